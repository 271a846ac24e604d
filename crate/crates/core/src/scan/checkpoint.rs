//! Append-only checkpoint file.
//!
//! One header line per committed sub-range, `kind lo hi exception_count`
//! (good-prime scans append `depth=d`), followed by that many exception rows:
//! `p n nu` for good-prime scans (`nu` is `>=d` when censored) and `p` for
//! Wieferich scans.

use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use super::{ScanException, ScanKind};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Committed {
    pub kind: ScanKind,
    pub depth: Option<u32>,
    pub lo: u64,
    pub hi: u64,
    pub exceptions: Vec<ScanException>,
}

pub struct Checkpoint {
    path: PathBuf,
}

impl Checkpoint {
    pub fn new(path: impl Into<PathBuf>) -> Self {
        Checkpoint { path: path.into() }
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    /// Every committed sub-range, in file order. A missing file is empty.
    pub fn load(&self) -> Result<Vec<Committed>> {
        let file = match File::open(&self.path) {
            Ok(f) => f,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
            Err(e) => return Err(e.into()),
        };
        let mut lines = BufReader::new(file).lines();
        let mut out = Vec::new();
        let mut line_no = 0usize;
        while let Some(line) = lines.next() {
            let line = line?;
            line_no += 1;
            if line.trim().is_empty() {
                continue;
            }
            let header = line_no;
            let bad = |what: &str| Error::Checkpoint(format!("line {header}: {what}"));
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() < 4 {
                return Err(bad("expected `kind lo hi exception_count`"));
            }
            let kind: ScanKind = fields[0].parse().map_err(|_| bad("unknown scan kind"))?;
            let num = |s: &str| s.parse::<u64>().map_err(|_| bad("expected an integer"));
            let (lo, hi, count) = (num(fields[1])?, num(fields[2])?, num(fields[3])?);
            let depth = match fields.get(4) {
                Some(f) => Some(f.strip_prefix("depth=").and_then(|d| d.parse().ok()).ok_or_else(|| bad("bad depth field"))?),
                None => None,
            };
            let mut exceptions = Vec::with_capacity(count as usize);
            for _ in 0..count {
                let row = lines.next().ok_or_else(|| bad("truncated exception rows"))??;
                line_no += 1;
                let at = line_no;
                let bad = |what: &str| Error::Checkpoint(format!("line {at}: {what}"));
                let cols: Vec<&str> = row.split_whitespace().collect();
                let num = |s: &str| s.parse::<u64>().map_err(|_| bad("expected an integer"));
                exceptions.push(match (kind, cols.as_slice()) {
                    (ScanKind::Wieferich, [p]) => ScanException::prime(num(p)?),
                    (ScanKind::GoodPrime, [p, n, nu]) => {
                        let (nu, censored) = match nu.strip_prefix(">=") {
                            Some(v) => (num(v)?, true),
                            None => (num(nu)?, false),
                        };
                        ScanException { p: num(p)?, n: Some(num(n)?), nu: Some(nu as u32), censored }
                    }
                    _ => return Err(bad("malformed exception row")),
                });
            }
            out.push(Committed { kind, depth, lo, hi, exceptions });
        }
        Ok(out)
    }

    /// Appends one sub-range as a single write.
    pub fn commit(&self, c: &Committed) -> Result<()> {
        let mut text = format!("{} {} {} {}", c.kind, c.lo, c.hi, c.exceptions.len());
        if let Some(d) = c.depth {
            text.push_str(&format!(" depth={d}"));
        }
        text.push('\n');
        for e in &c.exceptions {
            match (e.n, e.nu) {
                (Some(n), Some(nu)) if e.censored => text.push_str(&format!("{} {n} >={nu}\n", e.p)),
                (Some(n), Some(nu)) => text.push_str(&format!("{} {n} {nu}\n", e.p)),
                _ => text.push_str(&format!("{}\n", e.p)),
            }
        }
        let mut file = OpenOptions::new().create(true).append(true).open(&self.path)?;
        file.write_all(text.as_bytes())?;
        file.sync_data()?;
        Ok(())
    }
}
