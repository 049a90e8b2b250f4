//! Number formatting for tables.

/// `v` to `digits` significant digits, plain notation for moderate
/// magnitudes. `None` prints the shortest representation that parses back
/// to the same `f64`.
pub fn number(v: f64, digits: Option<usize>) -> String {
    let Some(digits) = digits else {
        return format!("{v}");
    };
    if v == 0.0 || !v.is_finite() {
        return format!("{v}");
    }
    // round first in scientific form so the exponent reflects the rounding
    let sci = format!("{:.*e}", digits - 1, v);
    let exp: i32 = sci
        .split_once('e')
        .map_or(0, |(_, e)| e.parse().unwrap_or(0));
    if (-5..15).contains(&exp) {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        let rounded: f64 = sci.parse().unwrap_or(v);
        format!("{rounded:.decimals$}")
    } else {
        sci
    }
}

/// Left-aligned first column, right-aligned numeric columns.
pub fn render(header: &[&str], rows: &[Vec<String>]) -> String {
    let cols = header.len();
    let mut width: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for r in rows {
        for (c, cell) in r.iter().enumerate().take(cols) {
            width[c] = width[c].max(cell.chars().count());
        }
    }
    let line = |cells: Vec<&str>| {
        let parts: Vec<String> = cells
            .iter()
            .enumerate()
            .map(|(c, s)| {
                if c == 0 {
                    format!("{s:<w$}", w = width[c])
                } else {
                    format!("{s:>w$}", w = width[c])
                }
            })
            .collect();
        parts.join("  ").trim_end().to_string()
    };
    let mut out = line(header.to_vec());
    out.push('\n');
    for r in rows {
        out.push_str(&line(r.iter().map(String::as_str).collect()));
        out.push('\n');
    }
    out
}
