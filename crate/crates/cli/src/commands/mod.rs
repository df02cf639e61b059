//! One module per subcommand. Each returns the text printed to standard
//! output and writes its artifacts into the output directory.

use std::fs;
use std::path::{Path, PathBuf};

use qimetric::format::fmt_f64;
use qimetric::C64;

use crate::error::CliResult;

pub mod amplitudes;
pub mod metric;
pub mod noise;
pub mod sweep;
pub mod third_order;
pub mod validate;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Output {
    /// Text for standard output.
    pub report: String,
    /// Files written, in order.
    pub files: Vec<PathBuf>,
}

impl Output {
    pub(crate) fn line(&mut self, text: impl AsRef<str>) {
        self.report.push_str(text.as_ref());
        self.report.push('\n');
    }

    /// Records a written file by name only, so reports do not depend on the
    /// output location.
    pub(crate) fn wrote(&mut self, path: PathBuf) {
        let name = path
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default();
        self.line(format!("wrote {name}"));
        self.files.push(path);
    }
}

pub(crate) fn prepare_dir(dir: &Path) -> CliResult<()> {
    fs::create_dir_all(dir)?;
    Ok(())
}

pub(crate) fn fmt_c(z: C64) -> String {
    let (re, im) = (z.re + 0.0, z.im + 0.0);
    if im.is_sign_negative() {
        format!("{} - {}i", fmt_f64(re), fmt_f64(-im))
    } else {
        format!("{} + {}i", fmt_f64(re), fmt_f64(im))
    }
}
