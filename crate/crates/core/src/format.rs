//! Deterministic text output: 17 significant digits, '.' decimal point,
//! ',' separator and '\n' line endings.

use std::fmt::Write as _;

use crate::texture::SpinTexture;

/// Round-trip-safe float text (17 significant digits).
pub fn float(v: f64) -> String {
    if v.is_nan() {
        "NaN".to_string()
    } else if v.is_infinite() {
        if v > 0.0 {
            "inf".to_string()
        } else {
            "-inf".to_string()
        }
    } else {
        format!("{v:.16e}")
    }
}

pub const TEXTURE_HEADER: &str = "x,y,rho,sx,sy,sz";

pub fn texture_csv(t: &SpinTexture) -> String {
    let g = t.grid;
    let mut out = String::with_capacity(g.len() * 150);
    out.push_str(TEXTURE_HEADER);
    out.push('\n');
    for iy in 0..g.resolution {
        for ix in 0..g.resolution {
            let i = g.index(ix, iy);
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                float(g.coord(ix)),
                float(g.coord(iy)),
                float(t.rho[i]),
                float(t.sx[i]),
                float(t.sy[i]),
                float(t.sz[i])
            );
        }
    }
    out
}

/// Parses a CSV produced by [`texture_csv`] back into rows of six floats.
pub fn parse_csv_rows(text: &str) -> Option<Vec<[f64; 6]>> {
    let mut lines = text.lines();
    if lines.next()? != TEXTURE_HEADER {
        return None;
    }
    lines
        .map(|l| {
            let v: Vec<f64> = l
                .split(',')
                .map(|f| f.parse().ok())
                .collect::<Option<_>>()?;
            v.try_into().ok()
        })
        .collect()
}
