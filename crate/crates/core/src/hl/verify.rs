//! From-scratch certificate checks; nothing here calls the search code.

use serde::{Deserialize, Serialize};

use super::{
    DenseMatrixCertificate, HLCertificate, HlMode, LevelProductColoring, MillikenCertificate, ProductColoring,
    SubtreeColoring,
};
use crate::strings::BitString;
use crate::tree::{enumerate_strong_subtrees, is_strong_subtree, FiniteTree};

/// A certificate with everything needed to re-check it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CertificateBundle {
    Hl { coloring: LevelProductColoring, height: usize, certificate: HLCertificate },
    Dense { coloring: ProductColoring, certificate: DenseMatrixCertificate },
    Milliken { tree: FiniteTree, coloring: SubtreeColoring, m: usize, certificate: MillikenCertificate },
}

pub fn verify_certificate(b: &CertificateBundle) -> bool {
    match b {
        CertificateBundle::Hl { coloring, height, certificate } => verify_hl(coloring, *height, certificate),
        CertificateBundle::Dense { coloring, certificate } => verify_dense(coloring, certificate),
        CertificateBundle::Milliken { tree, coloring, m, certificate } => {
            verify_milliken(tree, coloring, *m, certificate)
        }
    }
}

fn cartesian(lists: &[Vec<BitString>]) -> Vec<Vec<BitString>> {
    lists.iter().fold(vec![Vec::new()], |acc, l| {
        acc.iter()
            .flat_map(|p| {
                l.iter().map(move |x| {
                    let mut q = p.clone();
                    q.push(x.clone());
                    q
                })
            })
            .collect()
    })
}

pub fn verify_hl(c: &LevelProductColoring, height: usize, cert: &HLCertificate) -> bool {
    let trees = c.trees();
    if cert.witnesses.len() != trees.len() || cert.color >= c.k() || height == 0 {
        return false;
    }
    let levels = &cert.witnesses[0].levels;
    if levels.len() != height || levels.windows(2).any(|w| w[0] >= w[1]) {
        return false;
    }
    let mut subtrees = Vec::new();
    for (w, t) in cert.witnesses.iter().zip(trees) {
        if &w.levels != levels || w.nodes.iter().any(|x| !t.contains(x)) {
            return false;
        }
        let Ok(Some(s)) = is_strong_subtree(&w.nodes, t) else {
            return false;
        };
        if &s.level_fn.0 != levels {
            return false;
        }
        let leaves_kept = s.subtree.leaves().iter().all(|l| t.is_leaf(t.index_of(l).unwrap()));
        if cert.mode == HlMode::Leaves && !leaves_kept {
            return false;
        }
        subtrees.push(s.subtree);
    }
    let checked: Vec<usize> = match cert.mode {
        HlMode::General => (0..height).collect(),
        HlMode::Leaves => vec![height - 1],
    };
    checked.into_iter().all(|j| {
        let lists: Vec<Vec<BitString>> =
            subtrees.iter().map(|s| s.at_level(j).iter().map(|&i| s.node(i).clone()).collect()).collect();
        cartesian(&lists).iter().all(|t| c.color(t) == Some(cert.color))
    })
}

pub fn verify_dense(c: &ProductColoring, cert: &DenseMatrixCertificate) -> bool {
    let trees = c.trees();
    let d = trees.len();
    if cert.pi.len() != d || cert.parts.len() != d || cert.color >= c.k() {
        return false;
    }
    let Some(lp) = trees[0].level(&cert.pi[0]) else {
        return false;
    };
    if cert.m <= lp || trees.iter().any(|t| cert.m >= t.height()) {
        return false;
    }
    for ((t, sigma), part) in trees.iter().zip(&cert.pi).zip(&cert.parts) {
        if t.level(sigma) != Some(lp) || part.is_empty() || part.iter().any(|x| !t.contains(x)) {
            return false;
        }
        let dense = t
            .at_level(cert.m)
            .iter()
            .map(|&i| t.node(i))
            .filter(|tau| sigma.is_prefix_of(tau))
            .all(|tau| part.iter().any(|rho| tau.is_prefix_of(rho)));
        if !dense {
            return false;
        }
    }
    cartesian(&cert.parts).iter().all(|t| c.color(t) == Some(cert.color))
}

pub fn verify_milliken(t: &FiniteTree, c: &SubtreeColoring, m: usize, cert: &MillikenCertificate) -> bool {
    if cert.color >= c.k || cert.witness.nodes.iter().any(|x| !t.contains(x)) {
        return false;
    }
    let Ok(Some(s)) = is_strong_subtree(&cert.witness.nodes, t) else {
        return false;
    };
    if s.height() != m || s.level_fn.0 != cert.witness.levels {
        return false;
    }
    let Ok(inner) = enumerate_strong_subtrees(&s.subtree, c.n) else {
        return false;
    };
    !inner.is_empty() && inner.iter().all(|w| c.color(w.nodes()).ok() == Some(cert.color))
}
