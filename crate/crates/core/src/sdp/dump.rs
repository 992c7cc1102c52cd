//! `sdp-dump v1` text format.
//!
//! ```text
//! sdp-dump v1
//! dim <n> eq <p> ineq <q>
//! C <n*n pairs: re im, row-major>
//! EQ <b> <pairs>       (p lines)
//! LE <h> <pairs>       (q lines)
//! ```

use std::fmt::Write as _;

use super::SdpProblem;
use crate::error::{Error, Result};
use crate::numerics::{CMatrix, HermitianMatrix, C64};

pub const DUMP_MAGIC: &str = "sdp-dump v1";

fn push_matrix(out: &mut String, h: &HermitianMatrix) {
    let m = h.as_matrix();
    for i in 0..h.dim() {
        for j in 0..h.dim() {
            let z = m[(i, j)];
            let _ = write!(out, " {:e} {:e}", z.re, z.im);
        }
    }
}

pub fn write_dump(p: &SdpProblem) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{DUMP_MAGIC}");
    let _ = writeln!(
        out,
        "dim {} eq {} ineq {}",
        p.dim,
        p.eq_constraints.len(),
        p.ineq_constraints.len()
    );
    out.push('C');
    push_matrix(&mut out, &p.objective);
    out.push('\n');
    for (tag, rows) in [("EQ", &p.eq_constraints), ("LE", &p.ineq_constraints)] {
        for (a, b) in rows {
            let _ = write!(out, "{tag} {b:e}");
            push_matrix(&mut out, a);
            out.push('\n');
        }
    }
    out
}

fn bad(line: usize, msg: &str) -> Error {
    Error::Validation(format!("sdp-dump line {line}: {msg}"))
}

fn parse_matrix<'a>(
    line: usize,
    n: usize,
    fields: impl Iterator<Item = &'a str>,
) -> Result<HermitianMatrix> {
    let vals: Vec<f64> = fields
        .map(|f| {
            f.parse::<f64>()
                .map_err(|_| bad(line, &format!("bad number {f:?}")))
        })
        .collect::<Result<_>>()?;
    if vals.len() != 2 * n * n {
        return Err(bad(
            line,
            &format!("expected {} values, found {}", 2 * n * n, vals.len()),
        ));
    }
    let m = CMatrix::from_fn(n, n, |i, j| {
        let k = 2 * (i * n + j);
        C64::new(vals[k], vals[k + 1])
    });
    HermitianMatrix::new(m)
}

pub fn parse_dump(text: &str) -> Result<SdpProblem> {
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty());
    match lines.next() {
        Some((_, l)) if l.trim() == DUMP_MAGIC => {}
        _ => return Err(bad(1, "missing header")),
    }
    let (ln, header) = lines
        .next()
        .ok_or_else(|| bad(2, "missing dimension line"))?;
    let h: Vec<&str> = header.split_whitespace().collect();
    let num = |i: usize| -> Result<usize> {
        h.get(i)
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| bad(ln + 1, "malformed dimension line"))
    };
    if h.len() != 6 || h[0] != "dim" || h[2] != "eq" || h[4] != "ineq" {
        return Err(bad(ln + 1, "malformed dimension line"));
    }
    let (n, n_eq, n_le) = (num(1)?, num(3)?, num(5)?);

    let (ln, cline) = lines.next().ok_or_else(|| bad(3, "missing objective"))?;
    let mut f = cline.split_whitespace();
    if f.next() != Some("C") {
        return Err(bad(ln + 1, "expected objective line"));
    }
    let mut p = SdpProblem::new(parse_matrix(ln + 1, n, f)?);
    for (ln, l) in lines {
        let mut f = l.split_whitespace();
        let tag = f.next().unwrap_or_default();
        let rhs: f64 = f
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| bad(ln + 1, "missing right-hand side"))?;
        let a = parse_matrix(ln + 1, n, f)?;
        match tag {
            "EQ" => p.push_eq(a, rhs),
            "LE" => p.push_ineq(a, rhs),
            other => return Err(bad(ln + 1, &format!("unknown tag {other:?}"))),
        }
    }
    if p.eq_constraints.len() != n_eq || p.ineq_constraints.len() != n_le {
        return Err(bad(2, "constraint counts do not match the header"));
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_exact() {
        let h = HermitianMatrix::hermitian_part(&CMatrix::from_fn(3, 3, |i, j| {
            C64::new(1.0 / (1 + i + j) as f64, (i as f64 - j as f64) / 7.0)
        }));
        let mut p = SdpProblem::new(h.clone());
        p.push_eq(HermitianMatrix::identity(3), 1.0);
        p.push_ineq(h.scale(-0.3), 0.1 / 3.0);
        let text = write_dump(&p);
        assert!(text.starts_with("sdp-dump v1\ndim 3 eq 1 ineq 1\n"));
        assert_eq!(parse_dump(&text).unwrap(), p);
    }

    #[test]
    fn rejects_truncated_matrix() {
        let text = "sdp-dump v1\ndim 1 eq 0 ineq 0\nC 1 0 2\n";
        assert!(parse_dump(text).is_err());
    }
}
