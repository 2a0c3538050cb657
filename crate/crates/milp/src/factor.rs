//! Product-form basis inverse.
//!
//! `B^-1 = E_k^-1 ... E_1^-1`, each elementary factor differing from the
//! identity in a single column (the pivot position). Reinversion rebuilds
//! the file from the identity by pivoting the basic columns in one by one.

/// Entries smaller than this are dropped from eta columns.
const DROP_TOL: f64 = 1e-14;

#[derive(Debug, Clone, Default)]
pub(crate) struct EtaFile {
    m: usize,
    pivot_pos: Vec<usize>,
    pivot_val: Vec<f64>,
    start: Vec<usize>,
    idx: Vec<usize>,
    val: Vec<f64>,
}

impl EtaFile {
    pub fn new(m: usize) -> Self {
        Self {
            m,
            start: vec![0],
            ..Default::default()
        }
    }

    pub fn clear(&mut self) {
        self.pivot_pos.clear();
        self.pivot_val.clear();
        self.start.clear();
        self.start.push(0);
        self.idx.clear();
        self.val.clear();
    }

    /// Appends the factor for pivoting dense column `alpha` (already in
    /// current basis coordinates) into position `p`.
    pub fn push(&mut self, p: usize, alpha: &[f64]) {
        debug_assert_eq!(alpha.len(), self.m);
        let ap = alpha[p];
        self.pivot_pos.push(p);
        self.pivot_val.push(1.0 / ap);
        for (i, &a) in alpha.iter().enumerate() {
            if i != p && a.abs() > DROP_TOL {
                self.idx.push(i);
                self.val.push(-a / ap);
            }
        }
        self.start.push(self.idx.len());
    }

    /// Same as [`push`](Self::push) for a column that is a scaled unit
    /// vector at `p` (slack columns during reinversion).
    pub fn push_unit(&mut self, p: usize, ap: f64) {
        self.pivot_pos.push(p);
        self.pivot_val.push(1.0 / ap);
        self.start.push(self.idx.len());
    }

    /// `v <- B^-1 v`.
    pub fn ftran(&self, v: &mut [f64]) {
        for k in 0..self.pivot_pos.len() {
            let p = self.pivot_pos[k];
            let vp = v[p];
            if vp == 0.0 {
                continue;
            }
            v[p] = vp * self.pivot_val[k];
            for e in self.start[k]..self.start[k + 1] {
                v[self.idx[e]] += self.val[e] * vp;
            }
        }
    }

    /// `v <- v B^-1` (row vector).
    pub fn btran(&self, v: &mut [f64]) {
        for k in (0..self.pivot_pos.len()).rev() {
            let p = self.pivot_pos[k];
            let mut s = v[p] * self.pivot_val[k];
            for e in self.start[k]..self.start[k + 1] {
                s += self.val[e] * v[self.idx[e]];
            }
            v[p] = s;
        }
    }
}
