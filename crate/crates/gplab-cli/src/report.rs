//! Report rendering: 12-significant-digit numbers, aligned key/value and
//! table blocks, and the JSON envelope.

use serde::Serialize;

/// Decimal with 12 significant digits; exponent form outside a sane window.
pub fn sig12(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return format!("{v}");
    }
    let exp = v.abs().log10().floor() as i32;
    if !(-5..=14).contains(&exp) {
        return format!("{v:.11e}");
    }
    let decimals = (11 - exp).max(0) as usize;
    format!("{v:.decimals$}")
}

/// Two-column block: labels padded so the values align.
pub fn kv_block(rows: &[(String, String)]) -> String {
    let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    let mut out = String::new();
    for (k, v) in rows {
        out.push_str(&format!("{k:<width$}  {v}\n"));
    }
    out
}

/// Aligned table with a header row.
pub fn table(header: &[&str], rows: &[Vec<String>]) -> String {
    let cols = header.len();
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for row in rows {
        for c in 0..cols {
            widths[c] = widths[c].max(row[c].len());
        }
    }
    let mut out = String::new();
    let render = |cells: &[String], widths: &[usize]| {
        let mut line = String::new();
        for (c, cell) in cells.iter().enumerate() {
            if c + 1 == cells.len() {
                line.push_str(cell);
            } else {
                line.push_str(&format!("{cell:<w$}  ", w = widths[c]));
            }
        }
        line.trim_end().to_string()
    };
    let head: Vec<String> = header.iter().map(|s| s.to_string()).collect();
    out.push_str(&render(&head, &widths));
    out.push('\n');
    for row in rows {
        out.push_str(&render(row, &widths));
        out.push('\n');
    }
    out
}

/// Envelope every command emits: stable schema, no timestamps.
#[derive(Serialize)]
pub struct Envelope {
    pub schema_version: u64,
    pub command: &'static str,
    pub config: serde_json::Value,
    pub result: serde_json::Value,
}

pub fn to_json_bytes(envelope: &Envelope) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(envelope).expect("report serialization");
    bytes.push(b'\n');
    bytes
}
