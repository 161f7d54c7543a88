//! Dense square matrices over a product of chain rings.
//!
//! Entries are stored factor by factor (one row-major array per chain factor),
//! so every kernel runs on plain `i64` residues of a single chain ring.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::rings::{Arith, Ideal, QuotientMap, Ring, RingElem, Scalar};

/// One nonzero entry `E[dst][src] = sign` of a sparse signed partial permutation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SparseEntry {
    pub src: u32,
    pub dst: u32,
    pub sign: i8,
}

#[derive(Clone, Debug)]
pub struct Matrix {
    ring: Arc<Ring>,
    n: usize,
    data: Vec<Vec<Scalar>>,
}

impl PartialEq for Matrix {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.ring.spec() == other.ring.spec() && self.data == other.data
    }
}
impl Eq for Matrix {}

fn check_same(a: &Arc<Ring>, b: &Arc<Ring>) -> Result<()> {
    if Arc::ptr_eq(a, b) || a.spec() == b.spec() {
        Ok(())
    } else {
        Err(Error::SpecMismatch)
    }
}

fn matmul_factor(a: &Arith, x: &[Scalar], y: &[Scalar], n: usize) -> Vec<Scalar> {
    let mut out = vec![0; n * n];
    match *a {
        Arith::ZMod { m, .. } if m <= 1 << 16 => {
            let mut acc = vec![0i64; n];
            for i in 0..n {
                acc.iter_mut().for_each(|v| *v = 0);
                for k in 0..n {
                    let xik = x[i * n + k];
                    if xik == 0 {
                        continue;
                    }
                    let row = &y[k * n..(k + 1) * n];
                    for (v, &ykj) in acc.iter_mut().zip(row) {
                        *v += xik * ykj;
                    }
                }
                for (o, v) in out[i * n..(i + 1) * n].iter_mut().zip(&acc) {
                    *o = v % m;
                }
            }
        }
        Arith::ZMod { m, .. } => {
            let mut acc = vec![0i128; n];
            for i in 0..n {
                acc.iter_mut().for_each(|v| *v = 0);
                for k in 0..n {
                    let xik = x[i * n + k];
                    if xik == 0 {
                        continue;
                    }
                    let row = &y[k * n..(k + 1) * n];
                    for (v, &ykj) in acc.iter_mut().zip(row) {
                        *v += (xik * ykj) as i128;
                    }
                }
                for (o, v) in out[i * n..(i + 1) * n].iter_mut().zip(&acc) {
                    *o = (v % m as i128) as i64;
                }
            }
        }
        _ => {
            for i in 0..n {
                for k in 0..n {
                    let xik = x[i * n + k];
                    if xik == 0 {
                        continue;
                    }
                    for j in 0..n {
                        let ykj = y[k * n + j];
                        if ykj != 0 {
                            out[i * n + j] = a.add(out[i * n + j], a.mul(xik, ykj));
                        }
                    }
                }
            }
        }
    }
    out
}

fn invert_factor(a: &Arith, x: &[Scalar], n: usize) -> Option<Vec<Scalar>> {
    let mut m = x.to_vec();
    let mut inv = vec![0; n * n];
    for i in 0..n {
        inv[i * n + i] = a.from_int(1);
    }
    for col in 0..n {
        let pivot = (col..n).find(|&r| a.is_unit(m[r * n + col]))?;
        if pivot != col {
            for j in 0..n {
                m.swap(pivot * n + j, col * n + j);
                inv.swap(pivot * n + j, col * n + j);
            }
        }
        let s = a.inv(m[col * n + col])?;
        for j in 0..n {
            m[col * n + j] = a.mul(m[col * n + j], s);
            inv[col * n + j] = a.mul(inv[col * n + j], s);
        }
        for r in 0..n {
            if r == col {
                continue;
            }
            let f = m[r * n + col];
            if f == 0 {
                continue;
            }
            for j in 0..n {
                m[r * n + j] = a.sub(m[r * n + j], a.mul(f, m[col * n + j]));
                inv[r * n + j] = a.sub(inv[r * n + j], a.mul(f, inv[col * n + j]));
            }
        }
    }
    Some(inv)
}

impl Matrix {
    pub fn zeros(ring: &Arc<Ring>, n: usize) -> Matrix {
        Matrix { ring: ring.clone(), n, data: vec![vec![0; n * n]; ring.factor_count()] }
    }

    pub fn identity(ring: &Arc<Ring>, n: usize) -> Matrix {
        let mut m = Matrix::zeros(ring, n);
        for (f, a) in ring.arith().iter().enumerate() {
            let one = a.from_int(1);
            for i in 0..n {
                m.data[f][i * n + i] = one;
            }
        }
        m
    }

    pub fn from_rows(ring: &Arc<Ring>, rows: &[Vec<RingElem>]) -> Result<Matrix> {
        let n = rows.len();
        let mut m = Matrix::zeros(ring, n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Parse(format!("row {i} has {} entries, expected {n}", row.len())));
            }
            for (j, x) in row.iter().enumerate() {
                m.set(i, j, x)?;
            }
        }
        Ok(m)
    }

    pub fn ring(&self) -> &Arc<Ring> {
        &self.ring
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Raw residues of one factor, row-major.
    pub fn factor(&self, f: usize) -> &[Scalar] {
        &self.data[f]
    }

    #[inline]
    pub fn raw(&self, f: usize, i: usize, j: usize) -> Scalar {
        self.data[f][i * self.n + j]
    }

    pub fn get(&self, i: usize, j: usize) -> RingElem {
        let parts = self.data.iter().map(|d| d[i * self.n + j]).collect();
        self.ring.elem(parts).expect("stored residues are reduced")
    }

    pub fn set(&mut self, i: usize, j: usize, x: &RingElem) -> Result<()> {
        x.check_ring(&self.ring)?;
        for (d, v) in self.data.iter_mut().zip(x.parts()) {
            d[i * self.n + j] = *v;
        }
        Ok(())
    }

    pub fn entry_is_zero(&self, i: usize, j: usize) -> bool {
        self.data.iter().all(|d| d[i * self.n + j] == 0)
    }

    pub fn entry_in(&self, i: usize, j: usize, ideal: &Ideal) -> bool {
        (0..self.data.len()).all(|f| ideal.contains_scalar(f, self.data[f][i * self.n + j]))
    }

    pub fn row(&self, i: usize) -> Vec<RingElem> {
        (0..self.n).map(|j| self.get(i, j)).collect()
    }

    pub fn col(&self, j: usize) -> Vec<RingElem> {
        (0..self.n).map(|i| self.get(i, j)).collect()
    }

    pub fn rows(&self) -> Vec<Vec<RingElem>> {
        (0..self.n).map(|i| self.row(i)).collect()
    }

    pub fn is_identity(&self) -> bool {
        *self == Matrix::identity(&self.ring, self.n)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|d| d.iter().all(|x| *x == 0))
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix> {
        check_same(&self.ring, &other.ring)?;
        if self.n != other.n {
            return Err(Error::Domain("matrix sizes differ".into()));
        }
        let data = self
            .ring
            .arith()
            .iter()
            .enumerate()
            .map(|(f, a)| matmul_factor(a, &self.data[f], &other.data[f], self.n))
            .collect();
        Ok(Matrix { ring: self.ring.clone(), n: self.n, data })
    }

    fn zip(&self, other: &Matrix, op: fn(&Arith, Scalar, Scalar) -> Scalar) -> Result<Matrix> {
        check_same(&self.ring, &other.ring)?;
        let data = self
            .ring
            .arith()
            .iter()
            .enumerate()
            .map(|(f, a)| self.data[f].iter().zip(&other.data[f]).map(|(x, y)| op(a, *x, *y)).collect())
            .collect();
        Ok(Matrix { ring: self.ring.clone(), n: self.n, data })
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix> {
        self.zip(other, Arith::add)
    }

    pub fn sub(&self, other: &Matrix) -> Result<Matrix> {
        self.zip(other, Arith::sub)
    }

    pub fn transpose(&self) -> Matrix {
        let n = self.n;
        let data = self
            .data
            .iter()
            .map(|d| {
                let mut t = vec![0; n * n];
                for i in 0..n {
                    for j in 0..n {
                        t[j * n + i] = d[i * n + j];
                    }
                }
                t
            })
            .collect();
        Matrix { ring: self.ring.clone(), n, data }
    }

    /// `self <- (e + ξE) * self`: row `dst` gains `ξ * sign * row src`.
    pub fn apply_left(&mut self, ops: &[SparseEntry], value: &RingElem) {
        let n = self.n;
        for (f, a) in self.ring.clone().arith().iter().enumerate() {
            let xi = value.parts()[f];
            if xi == 0 {
                continue;
            }
            let d = &mut self.data[f];
            for e in ops {
                let c = a.mul_sign(xi, e.sign);
                let (s, t) = (e.src as usize * n, e.dst as usize * n);
                for j in 0..n {
                    let v = d[s + j];
                    if v != 0 {
                        d[t + j] = a.add(d[t + j], a.mul(c, v));
                    }
                }
            }
        }
    }

    /// `self <- self * (e + ξE)`: column `src` gains `ξ * sign * column dst`.
    pub fn apply_right(&mut self, ops: &[SparseEntry], value: &RingElem) {
        let n = self.n;
        for (f, a) in self.ring.clone().arith().iter().enumerate() {
            let xi = value.parts()[f];
            if xi == 0 {
                continue;
            }
            let d = &mut self.data[f];
            for e in ops {
                let c = a.mul_sign(xi, e.sign);
                let (s, t) = (e.src as usize, e.dst as usize);
                for i in 0..n {
                    let v = d[i * n + t];
                    if v != 0 {
                        d[i * n + s] = a.add(d[i * n + s], a.mul(c, v));
                    }
                }
            }
        }
    }

    /// `self <- D * self` for a diagonal `D`.
    pub fn scale_rows(&mut self, diag: &[RingElem]) {
        let n = self.n;
        for (f, a) in self.ring.clone().arith().iter().enumerate() {
            let d = &mut self.data[f];
            for (i, s) in diag.iter().enumerate() {
                let s = s.parts()[f];
                for j in 0..n {
                    d[i * n + j] = a.mul(d[i * n + j], s);
                }
            }
        }
    }

    /// `self <- self * D` for a diagonal `D`.
    pub fn scale_cols(&mut self, diag: &[RingElem]) {
        let n = self.n;
        for (f, a) in self.ring.clone().arith().iter().enumerate() {
            let d = &mut self.data[f];
            for (j, s) in diag.iter().enumerate() {
                let s = s.parts()[f];
                for i in 0..n {
                    d[i * n + j] = a.mul(d[i * n + j], s);
                }
            }
        }
    }

    /// Inverse by elimination with unit pivots.
    pub fn inverse(&self) -> Result<Matrix> {
        let data = self
            .ring
            .arith()
            .iter()
            .enumerate()
            .map(|(f, a)| invert_factor(a, &self.data[f], self.n))
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| match self.ring.is_finite() {
                true => Error::NonUnit("matrix is not invertible".into()),
                false => Error::Unsupported("no unit pivot over Z; supply the element as a word".into()),
            })?;
        Ok(Matrix { ring: self.ring.clone(), n: self.n, data })
    }

    pub fn reduce(&self, q: &QuotientMap) -> Result<Matrix> {
        check_same(&self.ring, &q.source)?;
        let data = q
            .plan()
            .iter()
            .map(|(f, m)| match m {
                None => self.data[*f].clone(),
                Some(m) => self.data[*f].iter().map(|x| x.rem_euclid(*m)).collect(),
            })
            .collect();
        Ok(Matrix { ring: q.target.clone(), n: self.n, data })
    }

    /// Block-diagonal part with respect to a grading of the basis.
    pub fn block_diagonal(&self, grade: &[usize]) -> Matrix {
        let n = self.n;
        let mut out = self.clone();
        for d in out.data.iter_mut() {
            for i in 0..n {
                for j in 0..n {
                    if grade[i] != grade[j] {
                        d[i * n + j] = 0;
                    }
                }
            }
        }
        out
    }

    /// Row vector times matrix.
    pub fn vec_mul(&self, v: &Vector) -> Vector {
        let n = self.n;
        let data = self
            .ring
            .arith()
            .iter()
            .enumerate()
            .map(|(f, a)| {
                let mut out = vec![0; n];
                for (i, &vi) in v.data[f].iter().enumerate() {
                    if vi == 0 {
                        continue;
                    }
                    for j in 0..n {
                        let m = self.data[f][i * n + j];
                        if m != 0 {
                            out[j] = a.add(out[j], a.mul(vi, m));
                        }
                    }
                }
                out
            })
            .collect();
        Vector { ring: self.ring.clone(), data }
    }

    /// Matrix times column vector.
    pub fn mul_vec(&self, v: &Vector) -> Vector {
        let n = self.n;
        let data = self
            .ring
            .arith()
            .iter()
            .enumerate()
            .map(|(f, a)| {
                let mut out = vec![0; n];
                for (i, o) in out.iter_mut().enumerate() {
                    for j in 0..n {
                        let m = self.data[f][i * n + j];
                        let vj = v.data[f][j];
                        if m != 0 && vj != 0 {
                            *o = a.add(*o, a.mul(m, vj));
                        }
                    }
                }
                out
            })
            .collect();
        Vector { ring: self.ring.clone(), data }
    }

    pub fn row_vector(&self, i: usize) -> Vector {
        let n = self.n;
        Vector { ring: self.ring.clone(), data: self.data.iter().map(|d| d[i * n..(i + 1) * n].to_vec()).collect() }
    }

    pub fn col_vector(&self, j: usize) -> Vector {
        let n = self.n;
        Vector { ring: self.ring.clone(), data: self.data.iter().map(|d| (0..n).map(|i| d[i * n + j]).collect()).collect() }
    }
}

/// A vector (row or column, by context) over the ring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vector {
    ring: Arc<Ring>,
    data: Vec<Vec<Scalar>>,
}

impl Vector {
    pub fn basis(ring: &Arc<Ring>, n: usize, i: usize) -> Vector {
        let data = ring
            .arith()
            .iter()
            .map(|a| {
                let mut v = vec![0; n];
                v[i] = a.from_int(1);
                v
            })
            .collect();
        Vector { ring: ring.clone(), data }
    }

    pub fn ring(&self) -> &Arc<Ring> {
        &self.ring
    }

    pub fn len(&self) -> usize {
        self.data[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, i: usize) -> RingElem {
        self.ring.elem(self.data.iter().map(|d| d[i]).collect()).expect("reduced residues")
    }

    pub fn raw(&self, f: usize, i: usize) -> Scalar {
        self.data[f][i]
    }

    pub fn entries(&self) -> Vec<RingElem> {
        (0..self.len()).map(|i| self.get(i)).collect()
    }

    pub fn is_zero_at(&self, i: usize) -> bool {
        self.data.iter().all(|d| d[i] == 0)
    }

    pub fn in_ideal_at(&self, i: usize, ideal: &Ideal) -> bool {
        (0..self.data.len()).all(|f| ideal.contains_scalar(f, self.data[f][i]))
    }

    /// `v <- (e + ξE) v` for a column vector.
    pub fn apply_left(&mut self, ops: &[SparseEntry], value: &RingElem) {
        for (f, a) in self.ring.clone().arith().iter().enumerate() {
            let xi = value.parts()[f];
            if xi == 0 {
                continue;
            }
            let d = &mut self.data[f];
            for e in ops {
                let v = d[e.src as usize];
                if v != 0 {
                    let t = e.dst as usize;
                    d[t] = a.add(d[t], a.mul(a.mul_sign(xi, e.sign), v));
                }
            }
        }
    }

    /// `w <- w (e + ξE)` for a row vector.
    pub fn apply_right(&mut self, ops: &[SparseEntry], value: &RingElem) {
        for (f, a) in self.ring.clone().arith().iter().enumerate() {
            let xi = value.parts()[f];
            if xi == 0 {
                continue;
            }
            let d = &mut self.data[f];
            for e in ops {
                let v = d[e.dst as usize];
                if v != 0 {
                    let s = e.src as usize;
                    d[s] = a.add(d[s], a.mul(a.mul_sign(xi, e.sign), v));
                }
            }
        }
    }

    pub fn reduce(&self, q: &QuotientMap) -> Vector {
        let data = q
            .plan()
            .iter()
            .map(|(f, m)| match m {
                None => self.data[*f].clone(),
                Some(m) => self.data[*f].iter().map(|x| x.rem_euclid(*m)).collect(),
            })
            .collect();
        Vector { ring: q.target.clone(), data }
    }
}
