//! Root systems of types `D_l`, `E_6`, `E_7` with the crossed node marked.
//!
//! Simple roots are numbered as in Bourbaki. A root is a coefficient vector over
//! the simple roots; all roots are kept in one canonical order (by height, then
//! lexicographically) and referred to by their position in it.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type RootId = usize;

/// Which embedding is studied.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CaseTag {
    /// `D_l` in its half-spin module, `l >= 5`.
    #[serde(rename = "a")]
    A,
    /// `E_6` in the 27-dimensional module.
    #[serde(rename = "b")]
    B,
    /// `E_7` in the 56-dimensional module.
    #[serde(rename = "c")]
    C,
}

impl CaseTag {
    pub fn parse(s: &str) -> Result<CaseTag> {
        match s.trim().to_ascii_lowercase().as_str() {
            "a" => Ok(CaseTag::A),
            "b" => Ok(CaseTag::B),
            "c" => Ok(CaseTag::C),
            _ => Err(Error::Parse(format!("unknown case '{s}' (expected a, b or c)"))),
        }
    }
}

impl fmt::Display for CaseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CaseTag::A => "a",
            CaseTag::B => "b",
            CaseTag::C => "c",
        })
    }
}

/// First type: `-λ0` is not a weight. Second type: the lowest component is `{-λ0}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EmbeddingType {
    First,
    Second,
}

pub const MIN_RANK_A: usize = 5;
pub const MAX_RANK_A: usize = 10;

#[derive(Debug)]
pub struct EmbeddingCase {
    pub tag: CaseTag,
    pub rank: usize,
    /// Index of the crossed simple root.
    pub crossed: usize,
    /// Index of the unique simple root joined to the crossed one.
    pub adjacent: usize,
    pub cartan: Vec<Vec<i32>>,
    roots: Vec<Vec<i32>>,
    index: HashMap<Vec<i32>, RootId>,
    neg: Vec<RootId>,
    sum: Vec<Option<RootId>>,
    pairing: Vec<i8>,
    simple: Vec<RootId>,
    delta: Vec<RootId>,
    omega_plus: Vec<RootId>,
    omega_minus: Vec<RootId>,
    delta_prime: Vec<RootId>,
    delta_second: Vec<RootId>,
    max_root: RootId,
    kind: EmbeddingType,
}

fn cartan_from_edges(rank: usize, edges: &[(usize, usize)]) -> Vec<Vec<i32>> {
    let mut c = vec![vec![0; rank]; rank];
    for (i, row) in c.iter_mut().enumerate() {
        row[i] = 2;
    }
    for &(a, b) in edges {
        c[a][b] = -1;
        c[b][a] = -1;
    }
    c
}

impl EmbeddingCase {
    /// `l` is only used for case `a`.
    pub fn new(tag: CaseTag, l: usize) -> Result<EmbeddingCase> {
        let (rank, edges, crossed, adjacent) = match tag {
            CaseTag::A => {
                if !(MIN_RANK_A..=MAX_RANK_A).contains(&l) {
                    return Err(Error::RankOutOfRange(format!(
                        "case a needs {MIN_RANK_A} <= l <= {MAX_RANK_A}, got {l}"
                    )));
                }
                let mut e: Vec<(usize, usize)> = (0..l - 2).map(|i| (i, i + 1)).collect();
                e.push((l - 3, l - 1));
                (l, e, l - 1, l - 3)
            }
            CaseTag::B => (6, vec![(0, 2), (2, 3), (3, 4), (4, 5), (1, 3)], 0, 2),
            CaseTag::C => (7, vec![(0, 2), (2, 3), (3, 4), (4, 5), (5, 6), (1, 3)], 6, 5),
        };
        let cartan = cartan_from_edges(rank, &edges);

        // Positive roots by raising: in a simply laced system β + α_i is a root
        // exactly when <β, α_i> = -1.
        let pair = |a: &[i32], b: &[i32]| -> i32 {
            let mut s = 0;
            for i in 0..rank {
                for j in 0..rank {
                    s += a[i] * cartan[i][j] * b[j];
                }
            }
            s
        };
        let mut positive: BTreeSet<Vec<i32>> = BTreeSet::new();
        let mut queue: VecDeque<Vec<i32>> = VecDeque::new();
        for i in 0..rank {
            let mut e = vec![0; rank];
            e[i] = 1;
            positive.insert(e.clone());
            queue.push_back(e);
        }
        while let Some(b) = queue.pop_front() {
            for i in 0..rank {
                let mut e = vec![0; rank];
                e[i] = 1;
                if pair(&b, &e) == -1 {
                    let mut c = b.clone();
                    c[i] += 1;
                    if positive.insert(c.clone()) {
                        queue.push_back(c);
                    }
                }
            }
        }
        let mut roots: Vec<Vec<i32>> = positive.iter().cloned().collect();
        roots.extend(positive.iter().map(|r| r.iter().map(|x| -x).collect::<Vec<_>>()));
        roots.sort_by(|a, b| {
            let (ha, hb): (i32, i32) = (a.iter().sum(), b.iter().sum());
            ha.cmp(&hb).then_with(|| a.cmp(b))
        });
        let n = roots.len();
        let index: HashMap<Vec<i32>, RootId> = roots.iter().cloned().enumerate().map(|(i, r)| (r, i)).collect();
        let neg: Vec<RootId> = roots
            .iter()
            .map(|r| index[&r.iter().map(|x| -x).collect::<Vec<_>>()])
            .collect();
        let mut sum = vec![None; n * n];
        let mut pairing = vec![0i8; n * n];
        for a in 0..n {
            for b in 0..n {
                let s: Vec<i32> = roots[a].iter().zip(&roots[b]).map(|(x, y)| x + y).collect();
                sum[a * n + b] = index.get(&s).copied();
                pairing[a * n + b] = pair(&roots[a], &roots[b]) as i8;
            }
        }
        let simple: Vec<RootId> = (0..rank)
            .map(|i| {
                let mut e = vec![0; rank];
                e[i] = 1;
                index[&e]
            })
            .collect();
        let level = |r: &Vec<i32>| r[crossed];
        let delta: Vec<RootId> = (0..n).filter(|&i| level(&roots[i]) == 0).collect();
        let omega_plus: Vec<RootId> = (0..n).filter(|&i| level(&roots[i]) == 1).collect();
        let omega_minus: Vec<RootId> = (0..n).filter(|&i| level(&roots[i]) == -1).collect();
        let delta_prime: Vec<RootId> = delta.iter().copied().filter(|&i| roots[i][adjacent] == 0).collect();
        let max_root = n - 1;

        let mut case = EmbeddingCase {
            tag,
            rank,
            crossed,
            adjacent,
            cartan,
            roots,
            index,
            neg,
            sum,
            pairing,
            simple,
            delta,
            omega_plus,
            omega_minus,
            delta_second: Vec::new(),
            delta_prime,
            max_root,
            kind: match tag {
                CaseTag::A if l % 2 == 1 => EmbeddingType::First,
                CaseTag::B => EmbeddingType::First,
                _ => EmbeddingType::Second,
            },
        };
        case.delta_second = match tag {
            CaseTag::A => {
                // Δ' is A_{l-3} + A_1 here; keep the component that is not A_1.
                let comps = case.components(&case.delta_prime);
                comps.into_iter().find(|c| c.len() > 2).ok_or_else(|| {
                    Error::Internal("no component of rank > 1 in the double-crossed subsystem".into())
                })?
            }
            _ => case.delta_prime.clone(),
        };
        Ok(case)
    }

    pub fn name(&self) -> String {
        match self.tag {
            CaseTag::A => format!("D{}", self.rank),
            CaseTag::B => "E6".into(),
            CaseTag::C => "E7".into(),
        }
    }

    pub fn kind(&self) -> EmbeddingType {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    pub fn roots(&self) -> std::ops::Range<RootId> {
        0..self.roots.len()
    }

    pub fn coeffs(&self, r: RootId) -> &[i32] {
        &self.roots[r]
    }

    pub fn find(&self, coeffs: &[i32]) -> Option<RootId> {
        self.index.get(coeffs).copied()
    }

    pub fn height(&self, r: RootId) -> i32 {
        self.roots[r].iter().sum()
    }

    pub fn is_positive(&self, r: RootId) -> bool {
        self.height(r) > 0
    }

    /// Coefficient of the crossed simple root.
    pub fn level(&self, r: RootId) -> i32 {
        self.roots[r][self.crossed]
    }

    pub fn neg(&self, r: RootId) -> RootId {
        self.neg[r]
    }

    pub fn add(&self, a: RootId, b: RootId) -> Option<RootId> {
        self.sum[a * self.roots.len() + b]
    }

    /// `a - b`, if a root.
    pub fn sub(&self, a: RootId, b: RootId) -> Option<RootId> {
        self.add(a, self.neg[b])
    }

    /// `<a, b>`; symmetric since the system is simply laced.
    pub fn pairing(&self, a: RootId, b: RootId) -> i32 {
        self.pairing[a * self.roots.len() + b] as i32
    }

    /// `s_b(a) = a - <a, b> b`.
    pub fn reflect(&self, a: RootId, b: RootId) -> RootId {
        match self.pairing(a, b) {
            0 => a,
            1 => self.sub(a, b).expect("reflection stays in the root system"),
            -1 => self.add(a, b).expect("reflection stays in the root system"),
            2 => self.neg[a],
            -2 => self.neg[a],
            _ => unreachable!("pairing out of range"),
        }
    }

    pub fn simple(&self, i: usize) -> RootId {
        self.simple[i]
    }

    pub fn simple_roots(&self) -> &[RootId] {
        &self.simple
    }

    /// Roots with zero crossed coefficient: the subsystem `Δ`.
    pub fn delta(&self) -> &[RootId] {
        &self.delta
    }

    pub fn omega_plus(&self) -> &[RootId] {
        &self.omega_plus
    }

    pub fn omega_minus(&self) -> &[RootId] {
        &self.omega_minus
    }

    /// Roots of `Δ` that also avoid the adjacent simple root.
    pub fn delta_prime(&self) -> &[RootId] {
        &self.delta_prime
    }

    /// The component of `Δ'` of rank greater than one.
    pub fn delta_second(&self) -> &[RootId] {
        &self.delta_second
    }

    pub fn max_root(&self) -> RootId {
        self.max_root
    }

    /// Positive simple roots of `Δ`.
    pub fn delta_simple(&self) -> Vec<RootId> {
        (0..self.rank).filter(|&i| i != self.crossed).map(|i| self.simple[i]).collect()
    }

    pub fn in_delta(&self, r: RootId) -> bool {
        self.level(r) == 0
    }

    /// Closure of `seed` under the reflections in `gens`.
    pub fn orbit(&self, seed: RootId, gens: &[RootId]) -> BTreeSet<RootId> {
        let mut seen = BTreeSet::from([seed]);
        let mut queue = VecDeque::from([seed]);
        while let Some(a) = queue.pop_front() {
            for &g in gens {
                let b = self.reflect(a, g);
                if seen.insert(b) {
                    queue.push_back(b);
                }
            }
        }
        seen
    }

    /// Partition of `set` into orbits under the reflections in `gens`, ordered by least element.
    pub fn orbits(&self, set: &[RootId], gens: &[RootId]) -> Vec<Vec<RootId>> {
        let mut left: BTreeSet<RootId> = set.iter().copied().collect();
        let mut out = Vec::new();
        while let Some(&a) = left.iter().next() {
            let o = self.orbit(a, gens);
            left.retain(|x| !o.contains(x));
            out.push(o.into_iter().collect());
        }
        out
    }

    /// Irreducible components of a closed symmetric set of roots
    /// (two roots are joined when they are not orthogonal).
    pub fn components(&self, set: &[RootId]) -> Vec<Vec<RootId>> {
        let mut left: BTreeSet<RootId> = set.iter().copied().collect();
        let mut out = Vec::new();
        while let Some(&a) = left.iter().next() {
            left.remove(&a);
            let mut comp = vec![a];
            let mut queue = VecDeque::from([a]);
            while let Some(x) = queue.pop_front() {
                let next: Vec<RootId> = left.iter().copied().filter(|&y| self.pairing(x, y) != 0).collect();
                for y in next {
                    left.remove(&y);
                    comp.push(y);
                    queue.push_back(y);
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// First `α ∈ Δ` (canonical order) with `α + β` a root.
    pub fn partner_root(&self, beta: RootId) -> Result<RootId> {
        self.delta
            .iter()
            .copied()
            .find(|&a| self.add(a, beta).is_some())
            .ok_or_else(|| Error::Internal(format!("no partner in Δ for root {:?}", self.roots[beta])))
    }

    pub fn format_root(&self, r: RootId) -> String {
        let c: Vec<String> = self.roots[r].iter().map(|x| x.to_string()).collect();
        format!("[{}]", c.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn counts(tag: CaseTag, l: usize) -> (usize, usize, usize, usize) {
        let c = EmbeddingCase::new(tag, l).unwrap();
        (c.len(), c.delta().len(), c.omega_plus().len(), c.omega_minus().len())
    }

    #[test]
    fn root_counts() {
        assert_eq!(counts(CaseTag::A, 5), (40, 20, 10, 10));
        assert_eq!(counts(CaseTag::B, 0), (72, 40, 16, 16));
        assert_eq!(counts(CaseTag::C, 0), (126, 72, 27, 27));
        // |D_l| = 2l(l-1), Δ = A_{l-1}
        for l in 5..=8 {
            let (n, d, p, _) = counts(CaseTag::A, l);
            assert_eq!(n, 2 * l * (l - 1));
            assert_eq!(d, l * (l - 1));
            assert_eq!(p, l * (l - 1) / 2);
        }
    }

    #[test]
    fn rank_bounds() {
        assert!(matches!(EmbeddingCase::new(CaseTag::A, 4), Err(Error::RankOutOfRange(_))));
        assert!(matches!(EmbeddingCase::new(CaseTag::A, MAX_RANK_A + 1), Err(Error::RankOutOfRange(_))));
    }

    #[test]
    fn highest_roots() {
        let e7 = EmbeddingCase::new(CaseTag::C, 0).unwrap();
        assert_eq!(e7.coeffs(e7.max_root()), &[2, 2, 3, 4, 3, 2, 1]);
        let e6 = EmbeddingCase::new(CaseTag::B, 0).unwrap();
        assert_eq!(e6.coeffs(e6.max_root()), &[1, 2, 2, 3, 2, 1]);
        let d5 = EmbeddingCase::new(CaseTag::A, 5).unwrap();
        assert_eq!(d5.coeffs(d5.max_root()), &[1, 2, 2, 1, 1]);
    }

    #[test]
    fn crossed_and_adjacent_coefficients() {
        for (tag, l) in [(CaseTag::A, 5), (CaseTag::A, 6), (CaseTag::B, 0), (CaseTag::C, 0)] {
            let c = EmbeddingCase::new(tag, l).unwrap();
            let top = c.coeffs(c.max_root());
            assert_eq!(top[c.crossed], 1);
            assert_eq!(top[c.adjacent], 2);
            assert_eq!(c.cartan[c.crossed][c.adjacent], -1);
        }
    }

    #[test]
    fn double_crossed_subsystems() {
        // A_2 in D_5, A_4 in E_6, D_5 in E_7
        assert_eq!(EmbeddingCase::new(CaseTag::A, 5).unwrap().delta_second().len(), 6);
        assert_eq!(EmbeddingCase::new(CaseTag::B, 0).unwrap().delta_second().len(), 20);
        assert_eq!(EmbeddingCase::new(CaseTag::C, 0).unwrap().delta_second().len(), 40);
    }

    #[test]
    fn reflections_preserve_roots_and_pairing() {
        let c = EmbeddingCase::new(CaseTag::B, 0).unwrap();
        for a in c.roots() {
            for b in c.roots() {
                let r = c.reflect(a, b);
                assert_eq!(c.reflect(r, b), a);
                assert_eq!(c.pairing(r, c.reflect(b, b)), c.pairing(a, b));
            }
        }
    }

    #[test]
    fn delta_orbits_of_omega_are_single() {
        for (tag, l) in [(CaseTag::A, 5), (CaseTag::B, 0), (CaseTag::C, 0)] {
            let c = EmbeddingCase::new(tag, l).unwrap();
            let gens = c.delta().to_vec();
            assert_eq!(c.orbits(c.omega_plus(), &gens).len(), 1);
            assert_eq!(c.orbits(c.omega_minus(), &gens).len(), 1);
        }
    }
}
