//! Monochromatic dense matrices in products of finite trees.

use serde::{Deserialize, Serialize};

use super::{common_height, ProductColoring, DEFAULT_BUDGET};
use crate::error::{Error, Result};
use crate::strings::BitString;
use crate::tree::FiniteTree;

/// `π` at a common level, a level `m` above it, and parts `P_i` that are `m`-`π_i`-dense.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DenseMatrixCertificate {
    pub pi: Vec<BitString>,
    pub m: usize,
    pub parts: Vec<Vec<BitString>>,
    pub color: u32,
}

pub fn find_dense_matrix(c: &ProductColoring) -> Result<Option<DenseMatrixCertificate>> {
    find_dense_matrix_with(c, DEFAULT_BUDGET)
}

/// Least by level of `π`, then `m`, then `π`, then color, then the extensions chosen for the
/// level-`m` nodes in order (each node's candidates in length-then-lex order).
pub fn find_dense_matrix_with(c: &ProductColoring, budget: u64) -> Result<Option<DenseMatrixCertificate>> {
    let trees = c.trees();
    let h = common_height(trees);
    let mut spent = 0u64;
    for lp in 0..h {
        for m in lp + 1..h {
            let lists: Vec<Vec<usize>> = trees.iter().map(|t| t.at_level(lp).to_vec()).collect();
            for pi in super::product(&lists) {
                for color in 0..c.k() {
                    let mut s = Solver::new(c, trees, &pi, m, color, budget, &mut spent);
                    if let Some(parts) = s.solve()? {
                        return Ok(Some(DenseMatrixCertificate {
                            pi: pi.iter().zip(trees).map(|(&i, t)| t.node(i).clone()).collect(),
                            m,
                            parts,
                            color,
                        }));
                    }
                }
            }
        }
    }
    Ok(None)
}

/// Backtracking over one extension per (coordinate, level-`m` node), coordinate by coordinate.
struct Solver<'a> {
    c: &'a ProductColoring,
    color: u32,
    slots: Vec<(usize, Vec<BitString>)>,
    chosen: Vec<Vec<BitString>>,
    budget: u64,
    spent: &'a mut u64,
}

impl<'a> Solver<'a> {
    fn new(
        c: &'a ProductColoring,
        trees: &[FiniteTree],
        pi: &[usize],
        m: usize,
        color: u32,
        budget: u64,
        spent: &'a mut u64,
    ) -> Self {
        let mut slots = Vec::new();
        for (i, (t, &p)) in trees.iter().zip(pi).enumerate() {
            for tau in t.descendants_at_level(p, m) {
                let base = t.node(tau);
                slots.push((i, t.nodes().iter().filter(|w| base.is_prefix_of(w)).cloned().collect()));
            }
        }
        slots.sort_by_key(|(i, _)| *i);
        Self { c, color, slots, chosen: vec![Vec::new(); trees.len()], budget, spent }
    }

    fn solve(&mut self) -> Result<Option<Vec<Vec<BitString>>>> {
        let empty_coord = (0..self.chosen.len()).any(|i| self.slots.iter().all(|(j, _)| *j != i));
        if empty_coord || self.slots.iter().any(|(_, e)| e.is_empty()) {
            return Ok(None);
        }
        Ok(if self.go(0)? { Some(self.chosen.clone()) } else { None })
    }

    fn go(&mut self, s: usize) -> Result<bool> {
        if s == self.slots.len() {
            return Ok(true);
        }
        let (coord, cands) = self.slots[s].clone();
        for w in cands {
            *self.spent += 1;
            if *self.spent > self.budget {
                return Err(Error::BudgetExceeded { budget: self.budget });
            }
            if self.consistent(coord, &w) {
                self.chosen[coord].push(w);
                if self.go(s + 1)? {
                    return Ok(true);
                }
                self.chosen[coord].pop();
            }
        }
        Ok(false)
    }

    /// Every tuple using `w` at `coord` and already chosen entries elsewhere has the color;
    /// vacuous while a later coordinate is still empty.
    fn consistent(&self, coord: usize, w: &BitString) -> bool {
        let d = self.chosen.len();
        let lists: Vec<Vec<BitString>> =
            (0..d).map(|i| if i == coord { vec![w.clone()] } else { self.chosen[i].clone() }).collect();
        super::product(&lists).iter().all(|t| self.c.color(t) == Some(self.color))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hl::verify_dense;
    use crate::strings::bs;

    fn cherry() -> FiniteTree {
        FiniteTree::new(["", "0", "1"].map(bs)).unwrap()
    }

    #[test]
    fn root_and_level_one() {
        let c = ProductColoring::from_fn(vec![cherry()], 2, |x| x[0].len() as u32).unwrap();
        let cert = find_dense_matrix(&c).unwrap().unwrap();
        assert_eq!(
            cert,
            DenseMatrixCertificate { pi: vec![bs("")], m: 1, parts: vec![vec![bs("0"), bs("1")]], color: 1 }
        );
        assert!(verify_dense(&c, &cert));
        let mut thin = cert;
        thin.parts[0].pop();
        assert!(!verify_dense(&c, &thin));
    }

    #[test]
    fn constant_coloring_takes_level_one() {
        let t = FiniteTree::full_binary(3);
        let c = ProductColoring::from_fn(vec![t.clone(), t], 1, |_| 0).unwrap();
        let cert = find_dense_matrix(&c).unwrap().unwrap();
        assert_eq!((cert.pi.clone(), cert.m), (vec![bs(""), bs("")], 1));
        assert_eq!(cert.parts, vec![vec![bs("0"), bs("1")]; 2]);
        assert!(verify_dense(&c, &cert));
    }

    #[test]
    fn split_colors_have_no_matrix() {
        let c = ProductColoring::from_fn(vec![cherry()], 3, |x| match x[0].to_string().as_str() {
            "e" => 2,
            "0" => 0,
            _ => 1,
        })
        .unwrap();
        assert_eq!(find_dense_matrix(&c).unwrap(), None);
    }

    #[test]
    fn deeper_extensions_are_used() {
        // Level 1 splits colors, but each side reaches color 0 one level up.
        let t = FiniteTree::full_binary(3);
        let c =
            ProductColoring::from_fn(vec![t], 2, |x| if x[0].to_string() == "1" || x[0].is_empty() { 1 } else { 0 })
                .unwrap();
        let cert = find_dense_matrix(&c).unwrap().unwrap();
        assert_eq!(cert.parts[0], vec![bs("0"), bs("10")]);
        assert!(verify_dense(&c, &cert));
    }
}
