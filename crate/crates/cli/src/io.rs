use std::fs;
use std::io::{self, Read, Write};
use std::path::Path;

use facloc::Instance;
use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

/// Reads `path`, or standard input when it is absent or `-`.
pub fn read_text(path: Option<&Path>) -> CliResult<String> {
    match path.filter(|p| p.as_os_str() != "-") {
        Some(p) => fs::read_to_string(p).map_err(|e| CliError::from(e).context(format!("reading {}", p.display()))),
        None => {
            let mut s = String::new();
            io::stdin().read_to_string(&mut s)?;
            Ok(s)
        }
    }
}

/// Writes `text` to `path`, or standard output when it is absent or `-`.
pub fn write_text(path: Option<&Path>, text: &str) -> CliResult<()> {
    match path.filter(|p| p.as_os_str() != "-") {
        Some(p) => fs::write(p, text).map_err(|e| CliError::from(e).context(format!("writing {}", p.display()))),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

pub fn to_pretty<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

/// Content hash of an instance, taken over its compact JSON form so that
/// formatting of the input file does not matter.
pub fn digest(inst: &Instance) -> String {
    format!("sha256:{}", hex::encode(Sha256::digest(inst.to_json().as_bytes())))
}

/// Combined hash of several digests, in order.
pub fn digest_all<'a>(digests: impl IntoIterator<Item = &'a str>) -> String {
    let mut h = Sha256::new();
    for d in digests {
        h.update(d.as_bytes());
        h.update(b"\n");
    }
    format!("sha256:{}", hex::encode(h.finalize()))
}

/// A facility set read from a file: a bare JSON array, a solution report
/// (`{"open": [...]}`) or a run report holding one.
pub fn read_open_set(path: &Path) -> CliResult<Vec<usize>> {
    let text = read_text(Some(path))?;
    let value: Value = serde_json::from_str(&text).map_err(|e| CliError::from(e).context(format!("parsing {}", path.display())))?;
    let candidates = [&value, &value["open"], &value["results"]["solution"]["open"]];
    let open = candidates.into_iter().find(|v| v.is_array()).and_then(|v| serde_json::from_value(v.clone()).ok());
    open.ok_or_else(|| CliError::input(format!("{}: no facility list found", path.display())))
}
