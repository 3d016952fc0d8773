//! Text serialization of configurations.
//!
//! ```text
//! dims: 3 2, offset: 0 -1
//! Pw==
//! ```
//!
//! The first line gives the sides and the offset, the second the bit field
//! packed least-significant-bit first (site `i` is bit `i % 8` of byte
//! `i / 8`) and base64 encoded with the standard alphabet. For `d = 0` both
//! lists are empty. An optional ASCII grid (`#` occupied, `.` empty, one line
//! per value of axis 1) may follow; it is ignored when parsing.

use base64::engine::general_purpose::STANDARD;
use base64::Engine;

use super::{BoxRegion, Configuration};
use crate::error::{Error, Result};

pub fn write_configuration(config: &Configuration) -> String {
    let r = config.region();
    let join = |v: Vec<String>| v.join(" ");
    let mut out = format!(
        "dims: {}, offset: {}\n",
        join(r.sides().iter().map(|s| s.to_string()).collect()),
        join(r.offset().iter().map(|o| o.to_string()).collect()),
    );
    let mut bytes = vec![0u8; config.volume().div_ceil(8)];
    for i in config.occupied_indices() {
        bytes[i / 8] |= 1 << (i % 8);
    }
    out.push_str(&STANDARD.encode(&bytes));
    out.push('\n');
    out
}

/// ASCII picture for `d ≤ 2`; `None` in higher dimension.
pub fn ascii_grid(config: &Configuration) -> Option<String> {
    let r = config.region();
    let (w, h) = match r.dim() {
        0 => (1, 1),
        1 => (r.sides()[0], 1),
        2 => (r.sides()[0], r.sides()[1]),
        _ => return None,
    };
    let mut s = String::with_capacity((w + 1) * h);
    for y in 0..h {
        for x in 0..w {
            s.push(if config.get(y * w + x) { '#' } else { '.' });
        }
        s.push('\n');
    }
    Some(s)
}

fn parse_list<T: std::str::FromStr>(s: &str) -> Result<Vec<T>> {
    s.split_whitespace()
        .map(|t| {
            t.parse()
                .map_err(|_| Error::Parse(format!("bad number {t:?}")))
        })
        .collect()
}

pub fn parse_configuration(text: &str) -> Result<Configuration> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("missing header".into()))?;
    let rest = header
        .strip_prefix("dims:")
        .ok_or_else(|| Error::Parse("header must start with 'dims:'".into()))?;
    let (dims, offset) = rest
        .split_once(", offset:")
        .or_else(|| rest.split_once(",offset:"))
        .ok_or_else(|| Error::Parse("header must contain ', offset:'".into()))?;
    let sides: Vec<usize> = parse_list(dims)?;
    let offset: Vec<i64> = parse_list(offset)?;
    let region = BoxRegion::new(offset, sides)?;
    let payload = lines.next().unwrap_or("");
    let bytes = STANDARD
        .decode(payload)
        .map_err(|e| Error::Parse(format!("bad base64: {e}")))?;
    if bytes.len() != region.volume().div_ceil(8) {
        return Err(Error::Parse("bit field length does not match dims".into()));
    }
    let mut config = Configuration::empty(region);
    for i in 0..config.volume() {
        if bytes[i / 8] >> (i % 8) & 1 == 1 {
            config.set(i, true);
        }
    }
    if bytes.iter().enumerate().any(|(b, &byte)| {
        (0..8).any(|k| byte >> k & 1 == 1 && b * 8 + k >= config.volume())
    }) {
        return Err(Error::Parse("bits set past the end of the region".into()));
    }
    Ok(config)
}
