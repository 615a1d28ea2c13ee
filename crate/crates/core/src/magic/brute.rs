//! Backtracking counter for magic squares with distinct positive entries.
//!
//! The first row is filled first; after that each free cell is chosen to
//! force as many further cells as possible. A cell that is the last open
//! cell of a line with a known target is solved by subtraction. Every open line, and the
//! whole square as one more line with target `n·S`, is pruned against the
//! smallest and largest sums its remaining cells can still reach with
//! distinct unused values.

use rayon::prelude::*;

use super::{LineSumSystem, MagicSpec, Variant};
use crate::error::{Error, Result};

/// Largest dilation the oracle accepts for `spec`, if any.
pub fn brute_force_bound(spec: &MagicSpec) -> Option<u64> {
    match (spec.n, spec.variant) {
        (0..=3, _) => Some(60),
        (4, Variant::Affine) => Some(36),
        (4, Variant::Cubical) => Some(18),
        _ => None,
    }
}

struct Search {
    n: usize,
    cells: usize,
    max: usize,
    /// Lines as cell lists; the last entry is the whole square.
    lines: Vec<Vec<usize>>,
    /// Per cell, the lines containing it.
    member: Vec<Vec<usize>>,
    /// Cells in fill order.
    order: Vec<usize>,
    /// Per line, the position in fill order of its last cell.
    last: Vec<usize>,
    /// Position of the last cell of the first row.
    first_row_end: usize,
    fixed_sum: Option<i64>,
}

#[derive(Clone)]
struct State {
    used: Vec<bool>,
    partial: Vec<i64>,
    filled: Vec<usize>,
    sum: Option<i64>,
}

impl Search {
    fn new(spec: &MagicSpec, t: u64) -> Self {
        let n = spec.n;
        let cells = n * n;
        let mut lines = LineSumSystem::new(n).lines;
        lines.push((0..cells).collect());
        let mut member = vec![Vec::new(); cells];
        for (k, line) in lines.iter().enumerate() {
            for &c in line {
                member[c].push(k);
            }
        }
        let order = fill_order(n, &lines, &member);
        let mut position = vec![0; cells];
        for (i, &c) in order.iter().enumerate() {
            position[c] = i;
        }
        let last = lines
            .iter()
            .map(|l| l.iter().map(|&c| position[c]).max().unwrap())
            .collect();
        let (max, fixed_sum) = match spec.variant {
            Variant::Affine => (t as usize, Some(t as i64)),
            Variant::Cubical => ((t as usize).saturating_sub(1), None),
        };
        Self {
            n,
            cells,
            max,
            lines,
            member,
            order,
            last,
            first_row_end: n - 1,
            fixed_sum,
        }
    }

    fn target(&self, line: usize, sum: i64) -> i64 {
        if line + 1 == self.lines.len() {
            sum * self.n as i64
        } else {
            sum
        }
    }

    fn root(&self) -> State {
        State {
            used: vec![false; self.max + 1],
            partial: vec![0; self.lines.len()],
            filled: vec![0; self.lines.len()],
            sum: self.fixed_sum,
        }
    }

    /// Whether `x` at cell `c` keeps every line reachable.
    fn admissible(&self, st: &State, c: usize, x: i64, unused: &[i64]) -> bool {
        let Some(sum) = st.sum else {
            return true;
        };
        for &k in &self.member[c] {
            let remaining = self.lines[k].len() - st.filled[k] - 1;
            let have = st.partial[k] + x;
            let goal = self.target(k, sum);
            if remaining == 0 {
                if have != goal {
                    return false;
                }
                continue;
            }
            let mut lo = 0i64;
            let mut taken = 0;
            for &v in unused.iter() {
                if taken == remaining {
                    break;
                }
                if v != x {
                    lo += v;
                    taken += 1;
                }
            }
            if taken < remaining || have + lo > goal {
                return false;
            }
            let mut hi = 0i64;
            taken = 0;
            for &v in unused.iter().rev() {
                if taken == remaining {
                    break;
                }
                if v != x {
                    hi += v;
                    taken += 1;
                }
            }
            if have + hi < goal {
                return false;
            }
        }
        true
    }

    fn place(&self, st: &mut State, c: usize, x: i64, sign: i64) {
        for &k in &self.member[c] {
            st.partial[k] += sign * x;
            if sign > 0 {
                st.filled[k] += 1;
            } else {
                st.filled[k] -= 1;
            }
        }
        st.used[x as usize] = sign > 0;
    }

    fn candidates(&self, st: &State, pos: usize) -> Vec<i64> {
        let c = self.order[pos];
        if let Some(sum) = st.sum {
            let mut forced: Option<i64> = None;
            for &k in &self.member[c] {
                if self.last[k] == pos {
                    let v = self.target(k, sum) - st.partial[k];
                    match forced {
                        Some(f) if f != v => return Vec::new(),
                        _ => forced = Some(v),
                    }
                }
            }
            if let Some(v) = forced {
                let ok = v >= 1 && (v as usize) <= self.max && !st.used[v as usize];
                return if ok { vec![v] } else { Vec::new() };
            }
        }
        (1..=self.max as i64).filter(|&v| !st.used[v as usize]).collect()
    }

    fn count_from(&self, st: &mut State, pos: usize) -> u64 {
        if pos == self.cells {
            return 1;
        }
        let c = self.order[pos];
        let unused: Vec<i64> = (1..=self.max as i64).filter(|&v| !st.used[v as usize]).collect();
        let mut total = 0;
        for x in self.candidates(st, pos) {
            let opened = st.sum.is_none() && pos == self.first_row_end;
            if opened {
                st.sum = Some(st.partial[0] + x);
            }
            if self.admissible(st, c, x, &unused) {
                self.place(st, c, x, 1);
                total += self.count_from(st, pos + 1);
                self.place(st, c, x, -1);
            }
            if opened {
                st.sum = None;
            }
        }
        total
    }
}

/// First row, then greedily the free cell whose placement forces the most
/// cells through lines left with a single open cell.
fn fill_order(n: usize, lines: &[Vec<usize>], member: &[Vec<usize>]) -> Vec<usize> {
    let cells = n * n;
    let mut placed = vec![false; cells];
    let mut order: Vec<usize> = (0..n).collect();
    for &c in &order {
        placed[c] = true;
    }
    let propagate = |placed: &mut Vec<bool>, order: &mut Vec<usize>| {
        let mut changed = true;
        while changed {
            changed = false;
            for line in lines {
                let open: Vec<usize> = line.iter().copied().filter(|&c| !placed[c]).collect();
                if open.len() == 1 {
                    placed[open[0]] = true;
                    order.push(open[0]);
                    changed = true;
                }
            }
        }
    };
    propagate(&mut placed, &mut order);
    while order.len() < cells {
        let best = (0..cells)
            .filter(|&c| !placed[c])
            .max_by_key(|&c| {
                let mut p = placed.clone();
                let mut o = Vec::new();
                p[c] = true;
                propagate(&mut p, &mut o);
                (o.len(), member[c].len(), std::cmp::Reverse(c))
            })
            .unwrap();
        placed[best] = true;
        order.push(best);
        propagate(&mut placed, &mut order);
    }
    order
}

/// Number of `n × n` magic squares with distinct positive entries: line sum
/// exactly `t` (affine) or all entries below `t` (cubical).
pub fn brute_force_count(spec: &MagicSpec, t: u64) -> Result<u64> {
    let bound = brute_force_bound(spec).ok_or_else(|| {
        Error::InvalidInput(format!("brute force is limited to n ≤ 4, got n = {}", spec.n))
    })?;
    if t > bound {
        return Err(Error::InvalidInput(format!(
            "brute force for n = {} ({}) is limited to t ≤ {bound}, got t = {t}",
            spec.n, spec.variant
        )));
    }
    if spec.n == 0 {
        return Ok(1);
    }
    let search = Search::new(spec, t);
    let root = search.root();
    // Parallel over the value of the first cell.
    let firsts = search.candidates(&root, 0);
    let unused: Vec<i64> = (1..=search.max as i64).collect();
    Ok(firsts
        .into_par_iter()
        .map(|x| {
            let mut st = root.clone();
            let opened = st.sum.is_none() && search.first_row_end == 0;
            if opened {
                st.sum = Some(x);
            }
            let c = search.order[0];
            if !search.admissible(&st, c, x, &unused) {
                return 0;
            }
            search.place(&mut st, c, x, 1);
            search.count_from(&mut st, 1)
        })
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn affine(n: usize) -> MagicSpec {
        MagicSpec::new(n, Variant::Affine)
    }

    fn cubical(n: usize) -> MagicSpec {
        MagicSpec::new(n, Variant::Cubical)
    }

    #[test]
    fn lo_shu_orbit() {
        assert_eq!(brute_force_count(&affine(3), 15).unwrap(), 8);
        assert_eq!(brute_force_count(&affine(3), 16).unwrap(), 0);
        assert_eq!(brute_force_count(&affine(3), 18).unwrap(), 24);
        assert_eq!(brute_force_count(&affine(3), 21).unwrap(), 32);
    }

    #[test]
    fn cubical_small_values() {
        assert_eq!(brute_force_count(&cubical(3), 9).unwrap(), 0);
        assert_eq!(brute_force_count(&cubical(3), 10).unwrap(), 8);
        assert_eq!(brute_force_count(&cubical(3), 11).unwrap(), 16);
    }

    #[test]
    fn tiny_squares() {
        assert_eq!(brute_force_count(&affine(1), 5).unwrap(), 1);
        for t in 1..20 {
            assert_eq!(brute_force_count(&affine(2), t).unwrap(), 0);
            assert_eq!(brute_force_count(&cubical(2), t).unwrap(), 0);
        }
    }

    #[test]
    fn bounds_are_enforced() {
        assert!(brute_force_count(&affine(3), 61).is_err());
        assert!(brute_force_count(&cubical(4), 19).is_err());
        assert!(brute_force_count(&affine(5), 65).is_err());
    }
}
