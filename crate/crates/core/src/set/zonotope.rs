//! Sparse (matrix) polynomial zonotopes.
//!
//! A matrix polynomial zonotope is the set
//!
//! ```text
//! { O + Σ_i (Π_k α_k^E[k,i]) G_i + Σ_j β_j GI_j  |  α, β ∈ [-1, 1] }
//! ```
//!
//! where the dependent factors `α_k` carry globally unique [`FactorId`]s so
//! that sets computed from the same source keep their correlation, and the
//! independent factors `β_j` are anonymous and private to one set.
//!
//! Entries are stored row-major; a vector is an `n x 1` matrix and is wrapped
//! by [`PolyZonotope`].

use std::collections::{BTreeMap, HashMap};

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::Interval;
use crate::error::{Error, Result};

/// Identifier of a dependent factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct FactorId(pub u32);

/// Issues fresh factor identifiers. Owned by whoever builds a computation.
#[derive(Debug, Clone)]
pub struct FactorIds {
    next: u32,
}

impl Default for FactorIds {
    fn default() -> Self {
        Self::new()
    }
}

impl FactorIds {
    pub fn new() -> Self {
        Self { next: 1 }
    }

    /// Continues numbering after `last`.
    pub fn starting_after(last: FactorId) -> Self {
        Self { next: last.0 + 1 }
    }

    pub fn fresh(&mut self) -> FactorId {
        let id = FactorId(self.next);
        self.next += 1;
        id
    }

    pub fn fresh_n(&mut self, n: usize) -> Vec<FactorId> {
        (0..n).map(|_| self.fresh()).collect()
    }
}

/// Concrete values for the factors of a set; used to evaluate members.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FactorAssignment {
    alpha: BTreeMap<FactorId, f64>,
    beta: Vec<f64>,
}

impl FactorAssignment {
    pub fn new(alpha: BTreeMap<FactorId, f64>, beta: Vec<f64>) -> Result<Self> {
        for &v in alpha.values().chain(beta.iter()) {
            if !(-1.0..=1.0).contains(&v) {
                return Err(Error::FactorOutOfRange(v));
            }
        }
        Ok(Self { alpha, beta })
    }

    /// All dependent factors at `value`, `q` independent factors at `value`.
    pub fn constant(ids: &[FactorId], q: usize, value: f64) -> Result<Self> {
        Self::new(ids.iter().map(|&id| (id, value)).collect(), vec![value; q])
    }

    /// Uniform draw over the factor hypercube.
    pub fn random<R: Rng + ?Sized>(ids: &[FactorId], q: usize, rng: &mut R) -> Self {
        Self {
            alpha: ids
                .iter()
                .map(|&id| (id, rng.gen_range(-1.0..=1.0)))
                .collect(),
            beta: (0..q).map(|_| rng.gen_range(-1.0..=1.0)).collect(),
        }
    }

    /// Random draw that only uses the hypercube corners (`±1`).
    pub fn random_vertex<R: Rng + ?Sized>(ids: &[FactorId], q: usize, rng: &mut R) -> Self {
        let pick = |rng: &mut R| if rng.gen::<bool>() { 1.0 } else { -1.0 };
        Self {
            alpha: ids.iter().map(|&id| (id, pick(rng))).collect(),
            beta: (0..q).map(|_| pick(rng)).collect(),
        }
    }

    pub fn alpha(&self, id: FactorId) -> Option<f64> {
        self.alpha.get(&id).copied()
    }

    pub fn alphas(&self) -> &BTreeMap<FactorId, f64> {
        &self.alpha
    }

    pub fn beta(&self) -> &[f64] {
        &self.beta
    }

    pub fn set_alpha(&mut self, id: FactorId, value: f64) -> Result<()> {
        if !(-1.0..=1.0).contains(&value) {
            return Err(Error::FactorOutOfRange(value));
        }
        self.alpha.insert(id, value);
        Ok(())
    }

    pub fn with_beta(mut self, beta: Vec<f64>) -> Result<Self> {
        if let Some(&v) = beta.iter().find(|v| !(-1.0..=1.0).contains(*v)) {
            return Err(Error::FactorOutOfRange(v));
        }
        self.beta = beta;
        Ok(self)
    }
}

/// Matrix polynomial zonotope `⟨O, G, G_I, E⟩` with identifier vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPolyZonotope", into = "RawPolyZonotope")]
pub struct MatPolyZonotope {
    rows: usize,
    cols: usize,
    offset: Vec<f64>,
    /// `h` blocks of `rows * cols` coefficients.
    dep: Vec<f64>,
    /// `q` blocks of `rows * cols` coefficients.
    indep: Vec<f64>,
    /// `h` blocks of `ids.len()` exponents: block `i` is column `i` of `E`.
    exp: Vec<u32>,
    ids: Vec<FactorId>,
}

/// Serialized layout: generators and exponents as nested arrays.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct RawPolyZonotope {
    rows: usize,
    cols: usize,
    offset: Vec<f64>,
    dep: Vec<Vec<f64>>,
    indep: Vec<Vec<f64>>,
    exp: Vec<Vec<u32>>,
    ids: Vec<u32>,
}

impl TryFrom<RawPolyZonotope> for MatPolyZonotope {
    type Error = Error;

    fn try_from(raw: RawPolyZonotope) -> Result<Self> {
        MatPolyZonotope::new(
            raw.rows,
            raw.cols,
            raw.offset,
            raw.dep.concat(),
            raw.indep.concat(),
            raw.exp.concat(),
            raw.ids.into_iter().map(FactorId).collect(),
        )
    }
}

impl From<MatPolyZonotope> for RawPolyZonotope {
    fn from(m: MatPolyZonotope) -> Self {
        let n = m.len();
        let p = m.ids.len();
        RawPolyZonotope {
            rows: m.rows,
            cols: m.cols,
            dep: m.dep.chunks(n.max(1)).map(<[f64]>::to_vec).collect(),
            indep: m.indep.chunks(n.max(1)).map(<[f64]>::to_vec).collect(),
            exp: if p == 0 {
                vec![Vec::new(); m.num_dep()]
            } else {
                m.exp.chunks(p).map(<[u32]>::to_vec).collect()
            },
            offset: m.offset,
            ids: m.ids.into_iter().map(|id| id.0).collect(),
        }
    }
}

fn check_ids(ids: &[FactorId]) -> Result<()> {
    if ids.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::MalformedSet(
            "factor ids must be strictly increasing".into(),
        ));
    }
    Ok(())
}

/// Union of two sorted id lists plus the position of every input id in it.
fn merge_ids(a: &[FactorId], b: &[FactorId]) -> (Vec<FactorId>, Vec<usize>, Vec<usize>) {
    let mut ids = Vec::with_capacity(a.len() + b.len());
    let (mut ia, mut ib) = (0, 0);
    let mut pos_a = Vec::with_capacity(a.len());
    let mut pos_b = Vec::with_capacity(b.len());
    while ia < a.len() || ib < b.len() {
        let take_a = ib == b.len() || (ia < a.len() && a[ia] <= b[ib]);
        let take_b = ia == a.len() || (ib < b.len() && b[ib] <= a[ia]);
        let pos = ids.len();
        if take_a {
            ids.push(a[ia]);
            pos_a.push(pos);
            ia += 1;
        }
        if take_b {
            if !take_a {
                ids.push(b[ib]);
            }
            pos_b.push(pos);
            ib += 1;
        }
    }
    (ids, pos_a, pos_b)
}

/// Row-major `n x k` times `k x m`.
fn matmul(a: &[f64], b: &[f64], n: usize, k: usize, m: usize, out: &mut [f64]) {
    for i in 0..n {
        for j in 0..m {
            let mut s = 0.0;
            for l in 0..k {
                s += a[i * k + l] * b[l * m + j];
            }
            out[i * m + j] = s;
        }
    }
}

/// Collects dependent generators, merging equal exponent vectors and folding
/// constant monomials into the offset.
struct DepAccumulator {
    n: usize,
    p: usize,
    offset: Vec<f64>,
    slots: HashMap<Vec<u32>, usize>,
    exp: Vec<u32>,
    gens: Vec<f64>,
}

impl DepAccumulator {
    fn new(offset: Vec<f64>, p: usize) -> Self {
        Self {
            n: offset.len(),
            p,
            offset,
            slots: HashMap::new(),
            exp: Vec::new(),
            gens: Vec::new(),
        }
    }

    fn add(&mut self, exp: &[u32], gen: &[f64]) {
        debug_assert_eq!(gen.len(), self.n);
        if exp.iter().all(|&e| e == 0) {
            for (o, g) in self.offset.iter_mut().zip(gen) {
                *o += g;
            }
            return;
        }
        match self.slots.get(exp) {
            Some(&slot) => {
                let dst = &mut self.gens[slot * self.n..(slot + 1) * self.n];
                for (d, g) in dst.iter_mut().zip(gen) {
                    *d += g;
                }
            }
            None => {
                self.slots
                    .insert(exp.to_vec(), self.exp.len() / self.p.max(1));
                if self.p == 0 {
                    // unreachable: a zero-length exponent is always constant
                    return;
                }
                self.exp.extend_from_slice(exp);
                self.gens.extend_from_slice(gen);
            }
        }
    }

    /// Drops generators that cancelled to exactly zero.
    fn finish(self) -> (Vec<f64>, Vec<f64>, Vec<u32>) {
        let n = self.n;
        let p = self.p;
        let mut gens = Vec::with_capacity(self.gens.len());
        let mut exp = Vec::with_capacity(self.exp.len());
        for (i, g) in self.gens.chunks(n.max(1)).enumerate() {
            if n > 0 && g.iter().any(|&x| x != 0.0) {
                gens.extend_from_slice(g);
                exp.extend_from_slice(&self.exp[i * p..(i + 1) * p]);
            }
        }
        (self.offset, gens, exp)
    }
}

fn push_nonzero(dst: &mut Vec<f64>, gen: &[f64]) {
    if gen.iter().any(|&x| x != 0.0) {
        dst.extend_from_slice(gen);
    }
}

impl MatPolyZonotope {
    pub fn new(
        rows: usize,
        cols: usize,
        offset: Vec<f64>,
        dep: Vec<f64>,
        indep: Vec<f64>,
        exp: Vec<u32>,
        ids: Vec<FactorId>,
    ) -> Result<Self> {
        let n = rows * cols;
        if offset.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: offset.len(),
            });
        }
        if n == 0 {
            if !dep.is_empty() || !indep.is_empty() || !exp.is_empty() {
                return Err(Error::MalformedSet("empty shape with generators".into()));
            }
        } else {
            if !dep.len().is_multiple_of(n) || !indep.len().is_multiple_of(n) {
                return Err(Error::MalformedSet(
                    "generator storage is not a multiple of the entry count".into(),
                ));
            }
            let h = dep.len() / n;
            if exp.len() != h * ids.len() {
                return Err(Error::MalformedSet(format!(
                    "exponent matrix has {} entries, expected {} x {}",
                    exp.len(),
                    ids.len(),
                    h
                )));
            }
        }
        check_ids(&ids)?;
        if offset
            .iter()
            .chain(&dep)
            .chain(&indep)
            .any(|x| !x.is_finite())
        {
            return Err(Error::MalformedSet("non-finite coefficient".into()));
        }
        Ok(Self {
            rows,
            cols,
            offset,
            dep,
            indep,
            exp,
            ids,
        })
    }

    /// Set with a single member.
    pub fn singleton(rows: usize, cols: usize, values: Vec<f64>) -> Result<Self> {
        Self::new(
            rows,
            cols,
            values,
            Vec::new(),
            Vec::new(),
            Vec::new(),
            Vec::new(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Number of entries, `rows * cols`.
    pub fn len(&self) -> usize {
        self.rows * self.cols
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn offset(&self) -> &[f64] {
        &self.offset
    }

    pub fn ids(&self) -> &[FactorId] {
        &self.ids
    }

    pub fn num_dep(&self) -> usize {
        if self.is_empty() {
            0
        } else {
            self.dep.len() / self.len()
        }
    }

    pub fn num_indep(&self) -> usize {
        if self.is_empty() {
            0
        } else {
            self.indep.len() / self.len()
        }
    }

    pub fn dep_gen(&self, i: usize) -> &[f64] {
        let n = self.len();
        &self.dep[i * n..(i + 1) * n]
    }

    pub fn indep_gen(&self, j: usize) -> &[f64] {
        let n = self.len();
        &self.indep[j * n..(j + 1) * n]
    }

    /// Column `i` of the exponent matrix, aligned with [`Self::ids`].
    pub fn exponent(&self, i: usize) -> &[u32] {
        let p = self.ids.len();
        &self.exp[i * p..(i + 1) * p]
    }

    pub fn is_singleton(&self) -> bool {
        self.dep.is_empty() && self.indep.is_empty()
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                found: other.len(),
            });
        }
        Ok(())
    }

    /// Exponent columns re-expressed over the union id list.
    fn lifted_exponents(&self, positions: &[usize], p: usize) -> Vec<u32> {
        let own = self.ids.len();
        let mut out = vec![0u32; self.num_dep() * p];
        for i in 0..self.num_dep() {
            for (k, &pos) in positions.iter().enumerate() {
                out[i * p + pos] = self.exp[i * own + k];
            }
        }
        out
    }

    /// Minkowski sum with identifier alignment: generators of factors that
    /// occur in both operands are combined, so shared factors stay shared.
    pub fn mink_sum(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        let (ids, pos_a, pos_b) = merge_ids(&self.ids, &other.ids);
        let p = ids.len();
        let offset: Vec<f64> = self
            .offset
            .iter()
            .zip(&other.offset)
            .map(|(a, b)| a + b)
            .collect();
        let mut acc = DepAccumulator::new(offset, p);
        let ea = self.lifted_exponents(&pos_a, p);
        for i in 0..self.num_dep() {
            acc.add(&ea[i * p..(i + 1) * p], self.dep_gen(i));
        }
        let eb = other.lifted_exponents(&pos_b, p);
        for i in 0..other.num_dep() {
            acc.add(&eb[i * p..(i + 1) * p], other.dep_gen(i));
        }
        let (offset, dep, exp) = acc.finish();
        let mut indep = self.indep.clone();
        indep.extend_from_slice(&other.indep);
        Self::new(self.rows, self.cols, offset, dep, indep, exp, ids)
    }

    /// Adds a constant matrix.
    pub fn translate(&self, shift: &[f64]) -> Result<Self> {
        if shift.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                found: shift.len(),
            });
        }
        let mut out = self.clone();
        for (o, s) in out.offset.iter_mut().zip(shift) {
            *o += s;
        }
        Ok(out)
    }

    /// Set product `{ M1 M2 }`.
    ///
    /// Dependent-by-dependent terms are exact (exponents add). Terms that
    /// multiply an independent generator with anything other than an offset
    /// are enclosed entrywise by one fresh independent generator per output
    /// entry whose magnitude is the sum of the absolute term values.
    pub fn mat_mul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: rhs.rows,
            });
        }
        let (n, k, m) = (self.rows, self.cols, rhs.cols);
        let out_len = n * m;
        let (ids, pos_a, pos_b) = merge_ids(&self.ids, &rhs.ids);
        let p = ids.len();
        let ea = self.lifted_exponents(&pos_a, p);
        let eb = rhs.lifted_exponents(&pos_b, p);

        let mut tmp = vec![0.0; out_len];
        let mut offset = vec![0.0; out_len];
        matmul(&self.offset, &rhs.offset, n, k, m, &mut offset);
        let mut acc = DepAccumulator::new(offset, p);

        let ha = self.num_dep();
        let hb = rhs.num_dep();
        let qa = self.num_indep();
        let qb = rhs.num_indep();

        let a_offset_nonzero = self.offset.iter().any(|&x| x != 0.0);
        let b_offset_nonzero = rhs.offset.iter().any(|&x| x != 0.0);

        if a_offset_nonzero {
            for j in 0..hb {
                matmul(&self.offset, rhs.dep_gen(j), n, k, m, &mut tmp);
                acc.add(&eb[j * p..(j + 1) * p], &tmp);
            }
        }
        if b_offset_nonzero {
            for i in 0..ha {
                matmul(self.dep_gen(i), &rhs.offset, n, k, m, &mut tmp);
                acc.add(&ea[i * p..(i + 1) * p], &tmp);
            }
        }
        let mut sum_exp = vec![0u32; p];
        for i in 0..ha {
            for j in 0..hb {
                for l in 0..p {
                    sum_exp[l] = ea[i * p + l] + eb[j * p + l];
                }
                matmul(self.dep_gen(i), rhs.dep_gen(j), n, k, m, &mut tmp);
                acc.add(&sum_exp, &tmp);
            }
        }
        let (offset, dep, exp) = acc.finish();

        let mut indep = Vec::with_capacity((qa + qb + out_len) * out_len);
        if a_offset_nonzero {
            for j in 0..qb {
                matmul(&self.offset, rhs.indep_gen(j), n, k, m, &mut tmp);
                push_nonzero(&mut indep, &tmp);
            }
        }
        if b_offset_nonzero {
            for j in 0..qa {
                matmul(self.indep_gen(j), &rhs.offset, n, k, m, &mut tmp);
                push_nonzero(&mut indep, &tmp);
            }
        }

        let mut radius = vec![0.0; out_len];
        let mut add_abs = |tmp: &[f64]| {
            for (r, t) in radius.iter_mut().zip(tmp) {
                *r += t.abs();
            }
        };
        for i in 0..ha {
            for j in 0..qb {
                matmul(self.dep_gen(i), rhs.indep_gen(j), n, k, m, &mut tmp);
                add_abs(&tmp);
            }
        }
        for i in 0..qa {
            for j in 0..hb {
                matmul(self.indep_gen(i), rhs.dep_gen(j), n, k, m, &mut tmp);
                add_abs(&tmp);
            }
            for j in 0..qb {
                matmul(self.indep_gen(i), rhs.indep_gen(j), n, k, m, &mut tmp);
                add_abs(&tmp);
            }
        }
        for (e, &r) in radius.iter().enumerate() {
            if r > 0.0 {
                let start = indep.len();
                indep.resize(start + out_len, 0.0);
                indep[start + e] = r;
            }
        }

        Self::new(n, m, offset, dep, indep, exp, ids)
    }

    /// `vec(Y) = M vec(X) + shift` on the row-major entry vector; `M` is
    /// `(out_rows * out_cols) x len()` row-major.
    pub fn affine_map(
        &self,
        matrix: &[f64],
        shift: &[f64],
        out_rows: usize,
        out_cols: usize,
    ) -> Result<Self> {
        let n = self.len();
        let out = out_rows * out_cols;
        if matrix.len() != out * n {
            return Err(Error::DimensionMismatch {
                expected: out * n,
                found: matrix.len(),
            });
        }
        if shift.len() != out {
            return Err(Error::DimensionMismatch {
                expected: out,
                found: shift.len(),
            });
        }
        let apply = |v: &[f64], dst: &mut Vec<f64>| {
            for r in 0..out {
                let row = &matrix[r * n..(r + 1) * n];
                dst.push(row.iter().zip(v).map(|(a, b)| a * b).sum());
            }
        };
        let mut offset = Vec::with_capacity(out);
        apply(&self.offset, &mut offset);
        for (o, s) in offset.iter_mut().zip(shift) {
            *o += s;
        }
        let mut acc = DepAccumulator::new(offset, self.ids.len());
        let mut buf = Vec::with_capacity(out);
        for i in 0..self.num_dep() {
            buf.clear();
            apply(self.dep_gen(i), &mut buf);
            acc.add(self.exponent(i), &buf);
        }
        let (offset, dep, exp) = acc.finish();
        let mut indep = Vec::with_capacity(self.num_indep() * out);
        for j in 0..self.num_indep() {
            buf.clear();
            apply(self.indep_gen(j), &mut buf);
            push_nonzero(&mut indep, &buf);
        }
        Self::new(
            out_rows,
            out_cols,
            offset,
            dep,
            indep,
            exp,
            self.ids.clone(),
        )
    }

    /// Selects the sub-matrix `rows x cols` (in the given order).
    pub fn index(&self, rows: &[usize], cols: &[usize]) -> Result<Self> {
        if let Some(&r) = rows.iter().find(|&&r| r >= self.rows) {
            return Err(Error::IndexOutOfRange(format!("row {r} of {}", self.rows)));
        }
        if let Some(&c) = cols.iter().find(|&&c| c >= self.cols) {
            return Err(Error::IndexOutOfRange(format!(
                "column {c} of {}",
                self.cols
            )));
        }
        let pick = |src: &[f64]| -> Vec<f64> {
            rows.iter()
                .flat_map(|&r| cols.iter().map(move |&c| src[r * self.cols + c]))
                .collect()
        };
        let offset = pick(&self.offset);
        let mut dep = Vec::with_capacity(self.num_dep() * rows.len() * cols.len());
        for i in 0..self.num_dep() {
            dep.extend(pick(self.dep_gen(i)));
        }
        let mut indep = Vec::with_capacity(self.num_indep() * rows.len() * cols.len());
        for j in 0..self.num_indep() {
            indep.extend(pick(self.indep_gen(j)));
        }
        Self::new(
            rows.len(),
            cols.len(),
            offset,
            dep,
            indep,
            self.exp.clone(),
            self.ids.clone(),
        )
    }

    /// Column `k` as a vector set.
    pub fn column(&self, k: usize) -> Result<PolyZonotope> {
        let rows: Vec<usize> = (0..self.rows).collect();
        Ok(PolyZonotope(self.index(&rows, &[k])?))
    }

    /// Stacks `other` below `self`; independent factors stay separate,
    /// dependent generators with equal exponents merge.
    pub fn stack_rows(&self, other: &Self) -> Result<Self> {
        if self.cols != other.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: other.cols,
            });
        }
        let (na, nb) = (self.len(), other.len());
        let n = na + nb;
        let (ids, pos_a, pos_b) = merge_ids(&self.ids, &other.ids);
        let p = ids.len();
        let mut offset = self.offset.clone();
        offset.extend_from_slice(&other.offset);
        let mut acc = DepAccumulator::new(offset, p);
        let mut buf = vec![0.0; n];
        let ea = self.lifted_exponents(&pos_a, p);
        for i in 0..self.num_dep() {
            buf.iter_mut().for_each(|x| *x = 0.0);
            buf[..na].copy_from_slice(self.dep_gen(i));
            acc.add(&ea[i * p..(i + 1) * p], &buf);
        }
        let eb = other.lifted_exponents(&pos_b, p);
        for i in 0..other.num_dep() {
            buf.iter_mut().for_each(|x| *x = 0.0);
            buf[na..].copy_from_slice(other.dep_gen(i));
            acc.add(&eb[i * p..(i + 1) * p], &buf);
        }
        let (offset, dep, exp) = acc.finish();
        let mut indep = Vec::with_capacity((self.num_indep() + other.num_indep()) * n);
        for j in 0..self.num_indep() {
            indep.extend_from_slice(self.indep_gen(j));
            indep.extend(std::iter::repeat_n(0.0, nb));
        }
        for j in 0..other.num_indep() {
            indep.extend(std::iter::repeat_n(0.0, na));
            indep.extend_from_slice(other.indep_gen(j));
        }
        Self::new(
            self.rows + other.rows,
            self.cols,
            offset,
            dep,
            indep,
            exp,
            ids,
        )
    }

    /// Appends independent generators (each `len()` long).
    pub fn with_indep(&self, extra: &[f64]) -> Result<Self> {
        let mut out = self.clone();
        if self.is_empty() || !extra.len().is_multiple_of(self.len()) {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                found: extra.len(),
            });
        }
        for g in extra.chunks(self.len()) {
            push_nonzero(&mut out.indep, g);
        }
        Ok(out)
    }

    /// Value of monomial `i` at the given factors.
    fn monomial(&self, i: usize, fa: &FactorAssignment) -> Result<f64> {
        let mut v = 1.0;
        for (k, &e) in self.exponent(i).iter().enumerate() {
            if e > 0 {
                let a = fa
                    .alpha(self.ids[k])
                    .ok_or(Error::MissingFactor(self.ids[k].0))?;
                v *= a.powi(e as i32);
            }
        }
        Ok(v)
    }

    /// Evaluates the defining expression (row-major entries).
    pub fn sample(&self, fa: &FactorAssignment) -> Result<Vec<f64>> {
        for id in &self.ids {
            if fa.alpha(*id).is_none() {
                return Err(Error::MissingFactor(id.0));
            }
        }
        if fa.beta().len() < self.num_indep() {
            return Err(Error::MissingIndependentFactor {
                needed: self.num_indep(),
                given: fa.beta().len(),
            });
        }
        let mut out = self.offset.clone();
        for i in 0..self.num_dep() {
            let w = self.monomial(i, fa)?;
            for (o, g) in out.iter_mut().zip(self.dep_gen(i)) {
                *o += w * g;
            }
        }
        for j in 0..self.num_indep() {
            let w = fa.beta()[j];
            for (o, g) in out.iter_mut().zip(self.indep_gen(j)) {
                *o += w * g;
            }
        }
        Ok(out)
    }

    /// Dependent part only, at the given `α` (independent factors at zero).
    pub fn sample_dependent(&self, fa: &FactorAssignment) -> Result<Vec<f64>> {
        let zero_beta = FactorAssignment {
            alpha: fa.alpha.clone(),
            beta: vec![0.0; self.num_indep()],
        };
        self.sample(&zero_beta)
    }

    /// Sound box: `offset ± Σ|G| ± Σ|G_I|` (every monomial lies in [-1, 1]).
    pub fn interval_hull(&self) -> Interval {
        let rad = self.generator_radius();
        let lo = self.offset.iter().zip(&rad).map(|(o, r)| o - r).collect();
        let hi = self.offset.iter().zip(&rad).map(|(o, r)| o + r).collect();
        Interval::new(lo, hi).expect("radius is non-negative")
    }

    /// Entrywise `Σ|G| + Σ|G_I|`.
    pub fn generator_radius(&self) -> Vec<f64> {
        let n = self.len();
        let mut rad = vec![0.0; n];
        if n == 0 {
            return rad;
        }
        for g in self.dep.chunks(n).chain(self.indep.chunks(n)) {
            for (r, x) in rad.iter_mut().zip(g) {
                *r += x.abs();
            }
        }
        rad
    }

    /// Drops dependent generators that cancelled to zero and merges equal
    /// exponent columns. Already applied by every constructor-producing op.
    pub fn compact(&self) -> Self {
        let p = self.ids.len();
        let mut acc = DepAccumulator::new(self.offset.clone(), p);
        for i in 0..self.num_dep() {
            acc.add(self.exponent(i), self.dep_gen(i));
        }
        let (offset, dep, exp) = acc.finish();
        let mut indep = Vec::with_capacity(self.indep.len());
        for j in 0..self.num_indep() {
            push_nonzero(&mut indep, self.indep_gen(j));
        }
        Self {
            rows: self.rows,
            cols: self.cols,
            offset,
            dep,
            indep,
            exp,
            ids: self.ids.clone(),
        }
    }

    /// Pretty JSON dump for fixtures and debugging.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }

    /// Structural comparison with absolute coefficient tolerance.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        let close = |a: &[f64], b: &[f64]| {
            a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
        };
        self.rows == other.rows
            && self.cols == other.cols
            && self.ids == other.ids
            && self.exp == other.exp
            && close(&self.offset, &other.offset)
            && close(&self.dep, &other.dep)
            && close(&self.indep, &other.indep)
    }
}

/// Polynomial zonotope in R^n (an `n x 1` [`MatPolyZonotope`]).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatPolyZonotope", into = "MatPolyZonotope")]
pub struct PolyZonotope(MatPolyZonotope);

impl TryFrom<MatPolyZonotope> for PolyZonotope {
    type Error = Error;

    fn try_from(m: MatPolyZonotope) -> Result<Self> {
        if m.cols != 1 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                found: m.cols,
            });
        }
        Ok(Self(m))
    }
}

impl From<PolyZonotope> for MatPolyZonotope {
    fn from(p: PolyZonotope) -> Self {
        p.0
    }
}

impl PolyZonotope {
    pub fn new(
        offset: Vec<f64>,
        dep: Vec<f64>,
        indep: Vec<f64>,
        exp: Vec<u32>,
        ids: Vec<FactorId>,
    ) -> Result<Self> {
        let n = offset.len();
        Ok(Self(MatPolyZonotope::new(
            n, 1, offset, dep, indep, exp, ids,
        )?))
    }

    pub fn point(p: &[f64]) -> Self {
        Self(MatPolyZonotope::singleton(p.len(), 1, p.to_vec()).expect("finite point"))
    }

    /// `⟨center(iv), diag(radius(iv)), [], I⟩` with one factor per dimension.
    pub fn make_box(iv: &Interval, ids: &[FactorId]) -> Result<Self> {
        let n = iv.dim();
        if ids.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: ids.len(),
            });
        }
        check_ids(ids)?;
        let radius = iv.radius();
        let mut dep = vec![0.0; n * n];
        let mut exp = vec![0u32; n * n];
        for i in 0..n {
            dep[i * n + i] = radius[i];
            exp[i * n + i] = 1;
        }
        Self::new(iv.center(), dep, Vec::new(), exp, ids.to_vec())
    }

    pub fn dim(&self) -> usize {
        self.0.rows
    }

    pub fn as_matrix(&self) -> &MatPolyZonotope {
        &self.0
    }

    pub fn into_matrix(self) -> MatPolyZonotope {
        self.0
    }

    pub fn offset(&self) -> &[f64] {
        self.0.offset()
    }

    pub fn ids(&self) -> &[FactorId] {
        self.0.ids()
    }

    pub fn num_dep(&self) -> usize {
        self.0.num_dep()
    }

    pub fn num_indep(&self) -> usize {
        self.0.num_indep()
    }

    pub fn dep_gen(&self, i: usize) -> &[f64] {
        self.0.dep_gen(i)
    }

    pub fn indep_gen(&self, j: usize) -> &[f64] {
        self.0.indep_gen(j)
    }

    pub fn exponent(&self, i: usize) -> &[u32] {
        self.0.exponent(i)
    }

    pub fn mink_sum(&self, other: &Self) -> Result<Self> {
        Ok(Self(self.0.mink_sum(&other.0)?))
    }

    pub fn translate(&self, shift: &[f64]) -> Result<Self> {
        Ok(Self(self.0.translate(shift)?))
    }

    pub fn sample(&self, fa: &FactorAssignment) -> Result<Vec<f64>> {
        self.0.sample(fa)
    }

    pub fn interval_hull(&self) -> Interval {
        self.0.interval_hull()
    }

    /// Upper bound on `max { dirᵀ s | s ∈ P }` from the zonotope relaxation.
    pub fn support_upper(&self, dir: &[f64]) -> Result<f64> {
        Ok(self.support_point(dir)?.0)
    }

    /// Support bound together with the relaxation's maximizer
    /// `offset + Σ sign(dirᵀ g) g`.
    pub fn support_point(&self, dir: &[f64]) -> Result<(f64, Vec<f64>)> {
        let n = self.dim();
        if dir.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: dir.len(),
            });
        }
        let dot = |v: &[f64]| v.iter().zip(dir).map(|(a, b)| a * b).sum::<f64>();
        let mut value = dot(self.offset());
        let mut point = self.offset().to_vec();
        let gens = (0..self.num_dep())
            .map(|i| self.dep_gen(i))
            .chain((0..self.num_indep()).map(|j| self.indep_gen(j)));
        for g in gens {
            let d = dot(g);
            value += d.abs();
            let s = if d >= 0.0 { 1.0 } else { -1.0 };
            for (p, x) in point.iter_mut().zip(g) {
                *p += s * x;
            }
        }
        Ok((value, point))
    }

    /// Splits into the part linear in `input_ids` (offset plus generators
    /// whose exponent is a unit vector on an input id) and the rest.
    pub fn split_linear_error(&self, input_ids: &[FactorId]) -> Result<(Self, Self)> {
        let n = self.dim();
        let p = self.ids().len();
        let input_rows: Vec<Option<usize>> = input_ids
            .iter()
            .map(|id| self.ids().binary_search(id).ok())
            .collect();
        let is_linear = |e: &[u32]| {
            let mut ones = e.iter().enumerate().filter(|(_, &x)| x != 0);
            match (ones.next(), ones.next()) {
                (Some((row, &1)), None) => input_rows.contains(&Some(row)),
                _ => false,
            }
        };
        let (mut lin_dep, mut lin_exp) = (Vec::new(), Vec::new());
        let (mut err_dep, mut err_exp) = (Vec::new(), Vec::new());
        for i in 0..self.num_dep() {
            let e = self.exponent(i);
            if is_linear(e) {
                lin_dep.extend_from_slice(self.dep_gen(i));
                lin_exp.extend_from_slice(e);
            } else {
                err_dep.extend_from_slice(self.dep_gen(i));
                err_exp.extend_from_slice(e);
            }
        }
        debug_assert_eq!(lin_exp.len() + err_exp.len(), self.num_dep() * p);
        let ids = self.ids().to_vec();
        let linear = Self::new(
            self.offset().to_vec(),
            lin_dep,
            Vec::new(),
            lin_exp,
            ids.clone(),
        )?;
        let error = Self::new(vec![0.0; n], err_dep, self.0.indep.clone(), err_exp, ids)?;
        Ok((linear, error))
    }

    /// Selects coordinates.
    pub fn index(&self, rows: &[usize]) -> Result<Self> {
        Ok(Self(self.0.index(rows, &[0])?))
    }

    pub fn stack(&self, other: &Self) -> Result<Self> {
        Ok(Self(self.0.stack_rows(&other.0)?))
    }

    /// `y = M x + c` with `M` row-major `out x dim`.
    pub fn affine_map(&self, matrix: &[f64], shift: &[f64]) -> Result<Self> {
        let out = shift.len();
        Ok(Self(self.0.affine_map(matrix, shift, out, 1)?))
    }

    pub fn with_indep(&self, extra: &[f64]) -> Result<Self> {
        Ok(Self(self.0.with_indep(extra)?))
    }

    pub fn generator_radius(&self) -> Vec<f64> {
        self.0.generator_radius()
    }

    pub fn to_json(&self) -> String {
        self.0.to_json()
    }
}
