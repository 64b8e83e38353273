//! Small dense linear algebra: Gaussian elimination with partial pivoting,
//! affine solution spaces, and vertex enumeration for polytopes given by
//! equalities plus inequalities. Everything here is exact dense arithmetic
//! on problems with at most a few dozen variables.

/// Pivots smaller than this are treated as zero.
pub const PIVOT_TOL: f64 = 1e-9;

/// Solve the square system `a x = b`. Returns `None` when `a` is singular
/// at tolerance [`PIVOT_TOL`]. `a` and `b` are consumed as scratch space.
pub fn solve_square(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    debug_assert!(a.len() == n && a.iter().all(|r| r.len() == n));
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| {
            a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap()
        })?;
        if a[piv][col].abs() < PIVOT_TOL {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            if f == 0.0 {
                continue;
            }
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut s = b[row];
        for k in row + 1..n {
            s -= a[row][k] * x[k];
        }
        x[row] = s / a[row][row];
    }
    Some(x)
}

/// The affine solution set of `a x = b`: one particular solution plus an
/// orthonormal-ish basis of the homogeneous nullspace.
#[derive(Clone, Debug)]
pub struct AffineSpace {
    pub particular: Vec<f64>,
    /// Basis vectors of the nullspace; empty when the solution is unique.
    pub basis: Vec<Vec<f64>>,
}

/// Row-reduce `a x = b` (any shape). Returns `None` when inconsistent.
pub fn solve_affine(mut a: Vec<Vec<f64>>, mut b: Vec<f64>, tol: f64) -> Option<AffineSpace> {
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut pivot_cols = Vec::new();
    let mut rank = 0usize;
    for col in 0..cols {
        let Some(piv) = (rank..rows)
            .filter(|&r| a[r][col].abs() >= tol)
            .max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())
        else {
            continue;
        };
        a.swap(rank, piv);
        b.swap(rank, piv);
        let inv = 1.0 / a[rank][col];
        for k in col..cols {
            a[rank][k] *= inv;
        }
        b[rank] *= inv;
        for r in 0..rows {
            if r != rank && a[r][col] != 0.0 {
                let f = a[r][col];
                for k in col..cols {
                    a[r][k] -= f * a[rank][k];
                }
                b[r] -= f * b[rank];
            }
        }
        pivot_cols.push(col);
        rank += 1;
        if rank == rows {
            break;
        }
    }
    for r in rank..rows {
        if b[r].abs() > tol {
            return None;
        }
    }

    let mut particular = vec![0.0; cols];
    for (r, &pc) in pivot_cols.iter().enumerate() {
        particular[pc] = b[r];
    }
    let free: Vec<usize> = (0..cols).filter(|c| !pivot_cols.contains(c)).collect();
    let mut basis = Vec::with_capacity(free.len());
    for &fc in &free {
        let mut v = vec![0.0; cols];
        v[fc] = 1.0;
        for (r, &pc) in pivot_cols.iter().enumerate() {
            v[pc] = -a[r][fc];
        }
        basis.push(v);
    }
    Some(AffineSpace { particular, basis })
}

/// A polytope `{ x : eq_a x = eq_b, ineq_a x >= ineq_b }`.
#[derive(Clone, Debug, Default)]
pub struct Polytope {
    pub eq_a: Vec<Vec<f64>>,
    pub eq_b: Vec<f64>,
    pub ineq_a: Vec<Vec<f64>>,
    pub ineq_b: Vec<f64>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

/// Enumerate the vertices of a bounded polytope by activating subsets of
/// inequalities on the affine span of the equalities. Returns `None` when
/// the equalities are already inconsistent. Duplicate vertices (within
/// `dedup_tol`) are merged. The polytope must be bounded; unbounded input
/// simply yields its vertices (rays are not reported).
pub fn vertices(p: &Polytope, feas_tol: f64, dedup_tol: f64) -> Option<Vec<Vec<f64>>> {
    let space = solve_affine(p.eq_a.clone(), p.eq_b.clone(), PIVOT_TOL)?;
    let d = space.basis.len();
    let feasible = |x: &[f64]| {
        p.ineq_a
            .iter()
            .zip(&p.ineq_b)
            .all(|(row, &rhs)| dot(row, x) >= rhs - feas_tol)
    };
    let mut out: Vec<Vec<f64>> = Vec::new();
    let mut push = |x: Vec<f64>| {
        if !out.iter().any(|y| {
            x.iter().zip(y).all(|(&a, &b)| (a - b).abs() <= dedup_tol)
        }) {
            out.push(x);
        }
    };
    if d == 0 {
        if feasible(&space.particular) {
            push(space.particular.clone());
        }
        return Some(out);
    }

    // Inequalities restricted to the affine coordinates y (x = p + B y):
    // row.x >= rhs becomes (row.B) y >= rhs - row.p.
    let m = p.ineq_a.len();
    let reduced: Vec<(Vec<f64>, f64)> = p
        .ineq_a
        .iter()
        .zip(&p.ineq_b)
        .map(|(row, &rhs)| {
            let coeffs: Vec<f64> =
                space.basis.iter().map(|bv| dot(row, bv)).collect();
            (coeffs, rhs - dot(row, &space.particular))
        })
        .collect();
    if m < d {
        return Some(out);
    }
    let mut active: Vec<usize> = (0..d).collect();
    loop {
        let a: Vec<Vec<f64>> =
            active.iter().map(|&i| reduced[i].0.clone()).collect();
        let b: Vec<f64> = active.iter().map(|&i| reduced[i].1).collect();
        if let Some(y) = solve_square(a, b) {
            let ok = reduced
                .iter()
                .all(|(row, rhs)| dot(row, &y) >= rhs - feas_tol);
            if ok {
                let mut x = space.particular.clone();
                for (bv, &yc) in space.basis.iter().zip(&y) {
                    for (xi, &bi) in x.iter_mut().zip(bv) {
                        *xi += yc * bi;
                    }
                }
                push(x);
            }
        }
        // Next d-subset of 0..m in lexicographic order.
        let mut i = d;
        loop {
            if i == 0 {
                return Some(out);
            }
            i -= 1;
            if active[i] != i + m - d {
                active[i] += 1;
                for j in i + 1..d {
                    active[j] = active[j - 1] + 1;
                }
                break;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_solve_roundtrips() {
        let a = vec![vec![2.0, 1.0], vec![1.0, 3.0]];
        let x = solve_square(a, vec![5.0, 10.0]).unwrap();
        assert!((2.0 * x[0] + x[1] - 5.0).abs() < 1e-12);
        assert!((x[0] + 3.0 * x[1] - 10.0).abs() < 1e-12);
        assert!(solve_square(vec![vec![1.0, 2.0], vec![2.0, 4.0]], vec![1.0, 2.0]).is_none());
    }

    #[test]
    fn affine_space_has_expected_dimension() {
        // x + y + z = 1 in R^3: a plane.
        let s = solve_affine(vec![vec![1.0, 1.0, 1.0]], vec![1.0], PIVOT_TOL).unwrap();
        assert_eq!(s.basis.len(), 2);
        assert!(solve_affine(
            vec![vec![1.0, 0.0], vec![1.0, 0.0]],
            vec![0.0, 1.0],
            PIVOT_TOL
        )
        .is_none());
    }

    #[test]
    fn simplex_vertices_are_recovered() {
        // The probability simplex in R^3.
        let p = Polytope {
            eq_a: vec![vec![1.0, 1.0, 1.0]],
            eq_b: vec![1.0],
            ineq_a: vec![
                vec![1.0, 0.0, 0.0],
                vec![0.0, 1.0, 0.0],
                vec![0.0, 0.0, 1.0],
            ],
            ineq_b: vec![0.0, 0.0, 0.0],
        };
        let mut vs = vertices(&p, 1e-9, 1e-9).unwrap();
        vs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(vs.len(), 3);
        for v in &vs {
            assert!(v.iter().sum::<f64>() - 1.0 < 1e-9);
            assert!(v.iter().filter(|&&c| (c - 1.0).abs() < 1e-9).count() == 1);
        }
    }
}
