//! Row reduction over `F_d`.

use alloc::vec;
use alloc::vec::Vec;

use crate::gf::{Field, FieldVector};

/// Reduced row-echelon form of `rows`.
///
/// Returns the nonzero reduced rows (pivot entries equal to 1, pivot columns
/// otherwise zero) and their pivot columns in increasing order.
pub(crate) fn rref(field: Field, rows: &[FieldVector], ncols: usize) -> (Vec<FieldVector>, Vec<usize>) {
    let mut m: Vec<FieldVector> = rows.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..ncols {
        if r == m.len() {
            break;
        }
        let Some(p) = (r..m.len()).find(|&i| m[i].get(col) != 0) else {
            continue;
        };
        m.swap(r, p);
        let inv = field.inv(m[r].get(col)).expect("nonzero pivot");
        m[r] = m[r].scale(inv);
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != r {
                let c = row.get(col);
                if c != 0 {
                    row.add_scaled(field.neg(c), &pivot_row);
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    m.truncate(r);
    (m, pivots)
}

#[cfg(test)]
pub(crate) fn rank(field: Field, rows: &[FieldVector], ncols: usize) -> usize {
    rref(field, rows, ncols).1.len()
}

/// Basis of `{x : r · x = 0 for every row r}`, one vector per free column,
/// each with a 1 in its free column.
pub(crate) fn nullspace(field: Field, rows: &[FieldVector], ncols: usize) -> Vec<FieldVector> {
    let (reduced, pivots) = rref(field, rows, ncols);
    let mut is_pivot = vec![false; ncols];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    let mut basis = Vec::with_capacity(ncols - pivots.len());
    for free in (0..ncols).filter(|&c| !is_pivot[c]) {
        let mut x = FieldVector::zero(field, ncols);
        x.set(free, 1);
        for (row, &p) in reduced.iter().zip(&pivots) {
            x.set(p, field.neg(row.get(free)));
        }
        basis.push(x);
    }
    basis
}

/// A solution of `r_i · x = rhs_i`, with every free variable set to zero,
/// or `None` if the system is inconsistent.
pub(crate) fn solve(field: Field, rows: &[FieldVector], rhs: &[u8], ncols: usize) -> Option<FieldVector> {
    assert_eq!(rows.len(), rhs.len());
    let augmented: Vec<FieldVector> = rows
        .iter()
        .zip(rhs)
        .map(|(r, &b)| r.concat(&FieldVector::from_raw(field, vec![b])))
        .collect();
    let (reduced, pivots) = rref(field, &augmented, ncols + 1);
    if pivots.last() == Some(&ncols) {
        return None;
    }
    let mut x = FieldVector::zero(field, ncols);
    for (row, &p) in reduced.iter().zip(&pivots) {
        x.set(p, row.get(ncols));
    }
    Some(x)
}
