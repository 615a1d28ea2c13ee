//! Plain-text H-representation and hyperplane files.
//!
//! H-representation: a header `d m k`, then `m` lines `b a1 … ad s` for
//! `a·x ≥ b` (`s = 0`) or `a·x > b` (`s = 1`), then `k` lines `b a1 … ad`
//! for `a·x = b`. Hyperplane files hold one `b a1 … ad` line per
//! hyperplane. Blank lines and `#` comments are ignored.

use super::{Equality, HPolyhedron, Inequality, Strictness};
use crate::error::{Error, Result};
use crate::exact::Integer;

fn data_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("").trim();
        (!l.is_empty()).then(|| (i + 1, l.split_whitespace().collect()))
    })
}

fn parse_ints(line: usize, fields: &[&str]) -> Result<Vec<Integer>> {
    fields
        .iter()
        .map(|f| {
            f.parse::<Integer>().map_err(|_| Error::Parse {
                line,
                message: format!("not an integer: {f:?}"),
            })
        })
        .collect()
}

fn expect_len(line: usize, fields: &[&str], n: usize) -> Result<()> {
    if fields.len() != n {
        return Err(Error::Parse {
            line,
            message: format!("expected {n} fields, found {}", fields.len()),
        });
    }
    Ok(())
}

pub fn parse_hrep(text: &str) -> Result<HPolyhedron> {
    let mut lines = data_lines(text);
    let (hl, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        message: "missing header `d m k`".into(),
    })?;
    expect_len(hl, &header, 3)?;
    let parse_count = |f: &str| {
        f.parse::<usize>().map_err(|_| Error::Parse {
            line: hl,
            message: format!("not a count: {f:?}"),
        })
    };
    let (d, m, k) = (
        parse_count(header[0])?,
        parse_count(header[1])?,
        parse_count(header[2])?,
    );
    let mut ineqs = Vec::with_capacity(m);
    let mut eqs = Vec::with_capacity(k);
    let mut last = hl;
    for _ in 0..m {
        let (ln, f) = lines.next().ok_or(Error::Parse {
            line: last + 1,
            message: "missing inequality line".into(),
        })?;
        last = ln;
        expect_len(ln, &f, d + 2)?;
        let v = parse_ints(ln, &f)?;
        let strictness = match f[d + 1] {
            "0" => Strictness::Weak,
            "1" => Strictness::Strict,
            other => {
                return Err(Error::Parse {
                    line: ln,
                    message: format!("strictness flag must be 0 or 1, found {other:?}"),
                })
            }
        };
        ineqs.push(Inequality::new(v[1..=d].to_vec(), v[0].clone(), strictness));
    }
    for _ in 0..k {
        let (ln, f) = lines.next().ok_or(Error::Parse {
            line: last + 1,
            message: "missing equality line".into(),
        })?;
        last = ln;
        expect_len(ln, &f, d + 1)?;
        let v = parse_ints(ln, &f)?;
        eqs.push(Equality::new(v[1..].to_vec(), v[0].clone()));
    }
    if let Some((ln, _)) = lines.next() {
        return Err(Error::Parse {
            line: ln,
            message: "trailing data after the declared constraints".into(),
        });
    }
    Ok(HPolyhedron::new(d, eqs, ineqs))
}

pub fn write_hrep(p: &HPolyhedron) -> String {
    let mut out = format!(
        "{} {} {}\n",
        p.dim(),
        p.inequalities().len(),
        p.equalities().len()
    );
    for c in p.inequalities() {
        out.push_str(&c.rhs.to_string());
        for a in &c.normal {
            out.push(' ');
            out.push_str(&a.to_string());
        }
        out.push_str(if c.is_strict() { " 1\n" } else { " 0\n" });
    }
    for e in p.equalities() {
        out.push_str(&e.rhs.to_string());
        for a in &e.normal {
            out.push(' ');
            out.push_str(&a.to_string());
        }
        out.push('\n');
    }
    out
}

/// Parses `(normal, offset)` pairs of dimension `d`.
pub fn parse_hyperplanes(text: &str, d: usize) -> Result<Vec<(Vec<Integer>, Integer)>> {
    data_lines(text)
        .map(|(ln, f)| {
            expect_len(ln, &f, d + 1)?;
            let v = parse_ints(ln, &f)?;
            Ok((v[1..].to_vec(), v[0].clone()))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::int;

    const SQUARE: &str = "2 4 0\n0 1 0 0\n0 0 1 0\n-1 -1 0 0\n-1 0 -1 0\n";

    #[test]
    fn parses_unit_square() {
        let p = parse_hrep(SQUARE).unwrap();
        assert_eq!(p.canonical(), HPolyhedron::cube(2, 0, 1, Strictness::Weak).canonical());
        assert_eq!(parse_hrep(&write_hrep(&p)).unwrap(), p);
    }

    #[test]
    fn reports_line_numbers() {
        let err = parse_hrep("2 1 0\n\n0 1 x 0\n").unwrap_err();
        assert_eq!(
            err,
            Error::Parse {
                line: 3,
                message: "not an integer: \"x\"".into()
            }
        );
        let err = parse_hrep("2 2 0\n0 1 0 0\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }));
        let err = parse_hrep("1 1 0\n0 1 2\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
    }

    #[test]
    fn hyperplane_file() {
        let h = parse_hyperplanes("0 1 -1\n# diagonal\n1 1 1\n", 2).unwrap();
        assert_eq!(h, vec![(vec![int(1), int(-1)], int(0)), (vec![int(1), int(1)], int(1))]);
    }
}
