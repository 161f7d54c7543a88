//! Weights of the minuscule module and the combinatorics of its weight graph.
//!
//! A weight is stored twice: by its coordinates in the fundamental weights, and
//! by its depth, the coefficient vector of `λ0 - λ` over the simple roots. The
//! canonical order sorts by the height of the depth, then lexicographically, so
//! the highest weight `λ0` comes first.

use std::collections::{HashMap, VecDeque};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::roots::{EmbeddingCase, EmbeddingType, RootId};

pub type WeightId = usize;

#[derive(Debug)]
pub struct WeightModule {
    case: Arc<EmbeddingCase>,
    coords: Vec<Vec<i32>>,
    depth: Vec<Vec<i32>>,
    index: HashMap<Vec<i32>, WeightId>,
    /// `shift[λ * |Φ| + α]` is `λ + α` when that is a weight.
    shift: Vec<Option<WeightId>>,
    /// `diff[λ * n + μ]` is the root `λ - μ`, if any.
    diff: Vec<Option<RootId>>,
    dist: Vec<u8>,
    neighbours: Vec<Vec<WeightId>>,
    components: Vec<Vec<WeightId>>,
    component_of: Vec<usize>,
    negation: Vec<Option<WeightId>>,
}

/// Diagram edge `upper -> lower = upper - α_i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DiagramEdge {
    pub upper: WeightId,
    pub lower: WeightId,
    pub simple: usize,
}

/// The roots `α` with `λ1 - α` a weight, split by their crossed coefficient,
/// together with the reflected subsystem `Δ_λ1`.
#[derive(Clone, Debug)]
pub struct SigmaSplit {
    pub lambda: WeightId,
    pub sigma: Vec<RootId>,
    pub minus: Vec<RootId>,
    pub zero: Vec<RootId>,
    pub plus: Vec<RootId>,
    /// The image of `Δ` under the reflection in `λ0 - λ1`.
    pub delta_lambda: Vec<RootId>,
    /// `Δ ∩ Δ_λ1`.
    pub delta_cap: Vec<RootId>,
    /// The component of `Δ ∩ Δ_λ1` that is not of type `A_1`.
    pub delta_cap_prime: Vec<RootId>,
}

impl WeightModule {
    pub fn new(case: Arc<EmbeddingCase>) -> Result<WeightModule> {
        let rank = case.rank;
        let mut top = vec![0; rank];
        top[case.crossed] = 1;
        let mut coords = vec![top];
        let mut depth = vec![vec![0; rank]];
        let mut index: HashMap<Vec<i32>, WeightId> = HashMap::from([(depth[0].clone(), 0)]);
        let mut queue = VecDeque::from([0usize]);
        while let Some(w) = queue.pop_front() {
            for i in 0..rank {
                match coords[w][i] {
                    1 => {
                        let c: Vec<i32> = (0..rank).map(|j| coords[w][j] - case.cartan[i][j]).collect();
                        let mut d = depth[w].clone();
                        d[i] += 1;
                        if !index.contains_key(&d) {
                            index.insert(d.clone(), coords.len());
                            queue.push_back(coords.len());
                            coords.push(c);
                            depth.push(d);
                        }
                    }
                    0 | -1 => {}
                    _ => return Err(Error::Internal("module is not minuscule".into())),
                }
            }
        }

        // canonical order
        let mut order: Vec<WeightId> = (0..coords.len()).collect();
        order.sort_by(|&a, &b| {
            let (ha, hb): (i32, i32) = (depth[a].iter().sum(), depth[b].iter().sum());
            ha.cmp(&hb).then_with(|| depth[a].cmp(&depth[b]))
        });
        let coords: Vec<Vec<i32>> = order.iter().map(|&i| coords[i].clone()).collect();
        let depth: Vec<Vec<i32>> = order.iter().map(|&i| depth[i].clone()).collect();
        let index: HashMap<Vec<i32>, WeightId> = depth.iter().cloned().enumerate().map(|(i, d)| (d, i)).collect();
        let n = coords.len();
        let nr = case.len();

        let mut shift = vec![None; n * nr];
        for w in 0..n {
            for r in case.roots() {
                let d: Vec<i32> = depth[w].iter().zip(case.coeffs(r)).map(|(x, y)| x - y).collect();
                shift[w * nr + r] = index.get(&d).copied();
            }
        }
        let mut diff = vec![None; n * n];
        let mut neighbours = vec![Vec::new(); n];
        for a in 0..n {
            for b in 0..n {
                let d: Vec<i32> = depth[b].iter().zip(&depth[a]).map(|(x, y)| x - y).collect();
                if let Some(r) = case.find(&d) {
                    diff[a * n + b] = Some(r);
                    neighbours[a].push(b);
                }
            }
        }
        let mut dist = vec![u8::MAX; n * n];
        for s in 0..n {
            dist[s * n + s] = 0;
            let mut queue = VecDeque::from([s]);
            while let Some(a) = queue.pop_front() {
                let da = dist[s * n + a];
                for &b in &neighbours[a] {
                    if dist[s * n + b] == u8::MAX {
                        dist[s * n + b] = da + 1;
                        queue.push_back(b);
                    }
                }
            }
        }
        let negation = coords
            .iter()
            .map(|c| {
                let neg: Vec<i32> = c.iter().map(|x| -x).collect();
                coords.iter().position(|d| *d == neg)
            })
            .collect();

        let mut module = WeightModule {
            case,
            coords,
            depth,
            index,
            shift,
            diff,
            dist,
            neighbours,
            components: Vec::new(),
            component_of: Vec::new(),
            negation,
        };
        module.build_components()?;
        Ok(module)
    }

    fn build_components(&mut self) -> Result<()> {
        let n = self.len();
        let crossed = self.case.crossed;
        let mut comp_of = vec![usize::MAX; n];
        let mut comps: Vec<Vec<WeightId>> = Vec::new();
        for s in 0..n {
            if comp_of[s] != usize::MAX {
                continue;
            }
            let id = comps.len();
            comp_of[s] = id;
            let mut members = vec![s];
            let mut queue = VecDeque::from([s]);
            while let Some(a) = queue.pop_front() {
                for e in self.diagram_edges_at(a) {
                    if e.simple == crossed {
                        continue;
                    }
                    let b = if e.upper == a { e.lower } else { e.upper };
                    if comp_of[b] == usize::MAX {
                        comp_of[b] = id;
                        members.push(b);
                        queue.push_back(b);
                    }
                }
            }
            members.sort_unstable();
            comps.push(members);
        }
        comps.sort_by_key(|c| c[0]);
        for (i, c) in comps.iter().enumerate() {
            let level = self.depth[c[0]][crossed];
            if level != i as i32 || c.iter().any(|&w| self.depth[w][crossed] != level) {
                return Err(Error::Internal("components do not match the crossed levels".into()));
            }
            for &w in c {
                comp_of[w] = i;
            }
        }
        self.components = comps;
        self.component_of = comp_of;
        Ok(())
    }

    fn diagram_edges_at(&self, w: WeightId) -> Vec<DiagramEdge> {
        let mut out = Vec::new();
        for i in 0..self.case.rank {
            let a = self.case.simple(i);
            if let Some(lower) = self.shift(w, self.case.neg(a)) {
                out.push(DiagramEdge { upper: w, lower, simple: i });
            }
            if let Some(upper) = self.shift(w, a) {
                out.push(DiagramEdge { upper, lower: w, simple: i });
            }
        }
        out
    }

    pub fn case(&self) -> &Arc<EmbeddingCase> {
        &self.case
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn weights(&self) -> std::ops::Range<WeightId> {
        0..self.coords.len()
    }

    /// The highest weight `λ0`.
    pub fn highest(&self) -> WeightId {
        0
    }

    pub fn coords(&self, w: WeightId) -> &[i32] {
        &self.coords[w]
    }

    pub fn depth(&self, w: WeightId) -> &[i32] {
        &self.depth[w]
    }

    pub fn find_depth(&self, depth: &[i32]) -> Option<WeightId> {
        self.index.get(depth).copied()
    }

    /// `λ + α`, if a weight.
    #[inline]
    pub fn shift(&self, w: WeightId, r: RootId) -> Option<WeightId> {
        self.shift[w * self.case.len() + r]
    }

    /// The root `λ - μ`, if it is one.
    #[inline]
    pub fn diff(&self, a: WeightId, b: WeightId) -> Option<RootId> {
        self.diff[a * self.len() + b]
    }

    /// `<λ, α>`.
    pub fn pairing(&self, w: WeightId, r: RootId) -> i32 {
        self.coords[w].iter().zip(self.case.coeffs(r)).map(|(x, y)| x * y).sum()
    }

    /// Path distance in the weight graph (edges join weights differing by a root).
    #[inline]
    pub fn distance(&self, a: WeightId, b: WeightId) -> u32 {
        self.dist[a * self.len() + b] as u32
    }

    pub fn neighbours(&self, w: WeightId) -> &[WeightId] {
        &self.neighbours[w]
    }

    pub fn diagram_edges(&self) -> Vec<DiagramEdge> {
        let mut out = Vec::new();
        for w in self.weights() {
            out.extend(self.diagram_edges_at(w).into_iter().filter(|e| e.upper == w));
        }
        out
    }

    pub fn components(&self) -> &[Vec<WeightId>] {
        &self.components
    }

    pub fn component_of(&self, w: WeightId) -> usize {
        self.component_of[w]
    }

    pub fn component_sizes(&self) -> Vec<usize> {
        self.components.iter().map(|c| c.len()).collect()
    }

    /// `-λ`, if a weight.
    pub fn negation(&self, w: WeightId) -> Option<WeightId> {
        self.negation[w]
    }

    pub fn kind(&self) -> EmbeddingType {
        match self.components.last() {
            Some(last) if last.len() == 1 && self.negation[0] == Some(last[0]) => EmbeddingType::Second,
            _ => EmbeddingType::First,
        }
    }

    /// `-λ0` for the second type.
    pub fn lowest(&self) -> Option<WeightId> {
        self.negation[0]
    }

    /// A weight of the same component at distance one from `λ1`; with `target`
    /// given, one at distance one from both.
    pub fn neighbor_in_component(&self, l1: WeightId, target: Option<WeightId>) -> Option<WeightId> {
        let comp = &self.components[self.component_of[l1]];
        comp.iter().copied().find(|&m| {
            m != l1 && self.distance(l1, m) == 1 && target.is_none_or(|t| t != m && self.distance(m, t) == 1)
        })
    }

    pub fn sigma_split(&self, l1: WeightId) -> Result<SigmaSplit> {
        let case = &self.case;
        let l0 = self.highest();
        if l1 == l0 {
            return Err(Error::Domain("the split is taken at a weight other than λ0".into()));
        }
        let sigma: Vec<RootId> = case.roots().filter(|&a| self.shift(l1, case.neg(a)).is_some()).collect();
        let minus = sigma.iter().copied().filter(|&a| case.level(a) == -1).collect();
        let zero = sigma.iter().copied().filter(|&a| case.level(a) == 0).collect();
        let plus = sigma.iter().copied().filter(|&a| case.level(a) == 1).collect();
        let mirror = self.diff(l0, l1).ok_or_else(|| Error::Domain("λ0 - λ1 is not a root".into()))?;
        let mut delta_lambda: Vec<RootId> = case.delta().iter().map(|&a| case.reflect(a, mirror)).collect();
        delta_lambda.sort_unstable();
        let delta_cap: Vec<RootId> = case.delta().iter().copied().filter(|a| delta_lambda.binary_search(a).is_ok()).collect();
        let delta_cap_prime = case
            .components(&delta_cap)
            .into_iter()
            .find(|c| c.len() > 2)
            .unwrap_or_default();
        Ok(SigmaSplit { lambda: l1, sigma, minus, zero, plus, delta_lambda, delta_cap, delta_cap_prime })
    }

    pub fn format_weight(&self, w: WeightId) -> String {
        let c: Vec<String> = self.coords[w].iter().map(|x| x.to_string()).collect();
        format!("({})", c.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::roots::CaseTag;

    fn module(tag: CaseTag, l: usize) -> WeightModule {
        WeightModule::new(Arc::new(EmbeddingCase::new(tag, l).unwrap())).unwrap()
    }

    #[test]
    fn sizes_and_components() {
        let a5 = module(CaseTag::A, 5);
        assert_eq!(a5.len(), 16);
        assert_eq!(a5.component_sizes(), vec![1, 10, 5]);
        let b = module(CaseTag::B, 0);
        assert_eq!(b.len(), 27);
        assert_eq!(b.component_sizes(), vec![1, 16, 10]);
        let c = module(CaseTag::C, 0);
        assert_eq!(c.len(), 56);
        assert_eq!(c.component_sizes(), vec![1, 27, 27, 1]);
        let a6 = module(CaseTag::A, 6);
        assert_eq!(a6.component_sizes(), vec![1, 15, 15, 1]);
    }

    #[test]
    fn type_matches_parity() {
        for l in 5..=8 {
            let m = module(CaseTag::A, l);
            assert_eq!(m.kind(), m.case().kind(), "l = {l}");
        }
        assert_eq!(module(CaseTag::B, 0).kind(), EmbeddingType::First);
        assert_eq!(module(CaseTag::C, 0).kind(), EmbeddingType::Second);
    }

    #[test]
    fn opposite_weights_in_e7_are_three_apart() {
        let c = module(CaseTag::C, 0);
        let low = c.lowest().unwrap();
        assert_eq!(c.distance(0, low), 3);
    }

    #[test]
    fn crossed_level_is_distance_from_top() {
        for (tag, l) in [(CaseTag::A, 5), (CaseTag::A, 6), (CaseTag::B, 0), (CaseTag::C, 0)] {
            let m = module(tag, l);
            for w in m.weights() {
                assert_eq!(m.distance(0, w) as usize, m.component_of(w));
            }
        }
    }

    #[test]
    fn top_weight_only_has_the_crossed_edge() {
        let m = module(CaseTag::B, 0);
        let edges: Vec<_> = m.diagram_edges().into_iter().filter(|e| e.upper == 0).collect();
        assert_eq!(edges.len(), 1);
        assert_eq!(edges[0].simple, m.case().crossed);
    }
}
