//! Sparse exact linear algebra over a [`Coeff`] field.
//!
//! Gauss-Jordan elimination with a fixed pivot rule: columns are scanned in
//! index order and the pivot is the first unused row (in insertion order)
//! with a nonzero entry. The result depends only on the input.

use std::collections::BTreeMap;

use crate::scalar::Coeff;

pub type SparseRow<C> = BTreeMap<usize, C>;

/// A linear system `A x = 0` (or `A x = b` via [`LinearSystem::solve`])
/// stored by rows.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearSystem<C> {
    pub ncols: usize,
    pub rows: Vec<SparseRow<C>>,
}

/// Reduced row echelon form: `rows[i]` has a one in column `pivots[i]`
/// and zeros in every other pivot column.
#[derive(Clone, Debug)]
pub struct Echelon<C> {
    pub pivots: Vec<usize>,
    pub rows: Vec<SparseRow<C>>,
}

impl<C: Coeff> LinearSystem<C> {
    pub fn new(ncols: usize) -> Self {
        LinearSystem { ncols, rows: Vec::new() }
    }

    pub fn push_row(&mut self, row: SparseRow<C>) {
        let row: SparseRow<C> = row.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        if !row.is_empty() {
            self.rows.push(row);
        }
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn rref(&self) -> Echelon<C> {
        rref(self.rows.clone(), self.ncols)
    }

    pub fn rank(&self) -> usize {
        self.rref().pivots.len()
    }

    /// Basis of the kernel, one vector per free column in increasing order.
    /// Every vector is scaled to coprime integers with a positive first
    /// nonzero entry.
    pub fn nullspace(&self) -> Vec<Vec<C>> {
        let ech = self.rref();
        let mut is_pivot = vec![false; self.ncols];
        for &p in &ech.pivots {
            is_pivot[p] = true;
        }
        let mut basis = Vec::new();
        for free in (0..self.ncols).filter(|&c| !is_pivot[c]) {
            let mut v = vec![C::zero(); self.ncols];
            v[free] = C::one();
            for (row, &p) in ech.rows.iter().zip(&ech.pivots) {
                if let Some(c) = row.get(&free) {
                    v[p] = -c.clone();
                }
            }
            C::make_primitive(&mut v);
            basis.push(v);
        }
        basis
    }

    /// A solution of `A x = rhs` with all free unknowns set to zero, or
    /// `None` if the system is inconsistent.
    pub fn solve(&self, rhs: &[C]) -> Option<Vec<C>> {
        assert_eq!(rhs.len(), self.rows.len(), "right-hand side length");
        let aug = self.ncols;
        let rows = self
            .rows
            .iter()
            .zip(rhs)
            .map(|(r, b)| {
                let mut r = r.clone();
                if !b.is_zero() {
                    r.insert(aug, b.clone());
                }
                r
            })
            .filter(|r| !r.is_empty())
            .collect();
        let ech = rref(rows, aug + 1);
        if ech.pivots.contains(&aug) {
            return None;
        }
        let mut x = vec![C::zero(); self.ncols];
        for (row, &p) in ech.rows.iter().zip(&ech.pivots) {
            if let Some(b) = row.get(&aug) {
                x[p] = b.clone();
            }
        }
        Some(x)
    }

    /// `A x` for a dense vector `x`.
    pub fn apply(&self, x: &[C]) -> Vec<C> {
        self.rows.iter().map(|r| r.iter().fold(C::zero(), |acc, (j, a)| acc + a.clone() * x[*j].clone())).collect()
    }
}

fn axpy<C: Coeff>(target: &mut SparseRow<C>, factor: &C, source: &SparseRow<C>) {
    for (j, s) in source {
        let v = target.get(j).cloned().unwrap_or_else(C::zero) - factor.clone() * s.clone();
        if v.is_zero() {
            target.remove(j);
        } else {
            target.insert(*j, v);
        }
    }
}

fn rref<C: Coeff>(mut rows: Vec<SparseRow<C>>, ncols: usize) -> Echelon<C> {
    let mut pivots = Vec::new();
    let mut done = 0;
    for col in 0..ncols {
        let Some(found) = (done..rows.len()).find(|&i| rows[i].contains_key(&col)) else {
            continue;
        };
        // keep the remaining rows in their original relative order
        let row = rows.remove(found);
        rows.insert(done, row);
        let inv = C::one() / rows[done][&col].clone();
        for v in rows[done].values_mut() {
            *v = v.clone() * inv.clone();
        }
        let pivot_row = rows[done].clone();
        for (i, r) in rows.iter_mut().enumerate() {
            if i == done {
                continue;
            }
            if let Some(f) = r.get(&col).cloned() {
                axpy(r, &f, &pivot_row);
            }
        }
        pivots.push(col);
        done += 1;
        if done == rows.len() {
            break;
        }
    }
    rows.truncate(done);
    Echelon { pivots, rows }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn system(ncols: usize, dense: &[&[i64]]) -> LinearSystem<Rational> {
        let mut ls = LinearSystem::new(ncols);
        for r in dense {
            ls.push_row(r.iter().enumerate().map(|(j, &a)| (j, q(a, 1))).collect());
        }
        ls
    }

    #[test]
    fn kernel_of_sum() {
        let ls = system(2, &[&[1, 1]]);
        assert_eq!(ls.nullspace(), vec![vec![q(1, 1), q(-1, 1)]]);
    }

    #[test]
    fn identity_has_trivial_kernel() {
        let ls = system(3, &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]);
        assert!(ls.nullspace().is_empty());
        assert_eq!(ls.rank(), 3);
    }

    #[test]
    fn kernel_is_primitive() {
        // 2x - 3y = 0, z free
        let ls = system(3, &[&[2, -3, 0], &[4, -6, 0]]);
        let ns = ls.nullspace();
        assert_eq!(ns, vec![vec![q(3, 1), q(2, 1), q(0, 1)], vec![q(0, 1), q(0, 1), q(1, 1)]]);
        for v in &ns {
            assert!(ls.apply(v).iter().all(|c| *c == q(0, 1)));
        }
    }

    #[test]
    fn solve_consistent_and_inconsistent() {
        let ls = system(2, &[&[1, 1], &[1, -1]]);
        assert_eq!(ls.solve(&[q(3, 1), q(1, 1)]), Some(vec![q(2, 1), q(1, 1)]));
        let ls = system(2, &[&[1, 1], &[2, 2]]);
        assert_eq!(ls.solve(&[q(1, 1), q(3, 1)]), None);
        assert_eq!(ls.solve(&[q(1, 1), q(2, 1)]), Some(vec![q(1, 1), q(0, 1)]));
    }
}
