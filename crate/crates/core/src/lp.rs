//! Deterministic max-min-slack solver over the probability simplex.
//!
//! Solves `maximize_{p in simplex} min_k c_k . p` for a handful of rows and
//! variables by enumerating basic active sets of the equivalent LP
//! (`max t` s.t. `c_k . p >= t`, `sum p = 1`, `p >= 0`). Problem sizes here
//! are tiny (rows = d-1, variables = number of maps), so exhaustive basis
//! enumeration is both simpler and more reproducible than pivoting.

#[derive(Debug, Clone)]
pub struct MaxSlack {
    pub p: Vec<f64>,
    pub slack: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LpError {
    #[error("feasibility enumeration limit exceeded (too many maps)")]
    TooLarge,
}

const FEAS_TOL: f64 = 1e-9;
const MAX_BASES: usize = 4_000_000;

/// Max over the simplex of the minimum row slack. Rows may be empty, in which
/// case the slack is unbounded and reported as infinity at the barycenter.
pub fn max_min_slack(rows: &[Vec<f64>]) -> Result<MaxSlack, LpError> {
    let m = rows.len();
    let n = rows.first().map(|r| r.len()).unwrap_or(0);
    if m == 0 {
        return Ok(MaxSlack { p: Vec::new(), slack: f64::INFINITY });
    }
    assert!(rows.iter().all(|r| r.len() == n));
    if n == 1 {
        let slack = rows.iter().map(|r| r[0]).fold(f64::INFINITY, f64::min);
        return Ok(MaxSlack { p: vec![1.0], slack });
    }

    let mut best: Option<MaxSlack> = None;
    let mut bases_seen = 0usize;

    // Active sets: T = tight rows (at least one), Z = zeroed coordinates,
    // |T| + |Z| = n. Unknowns are (p_1..p_n, t).
    let row_subsets = subsets_up_to(m, n.min(m));
    for tight in &row_subsets {
        if tight.is_empty() {
            continue;
        }
        let z_size = n - tight.len();
        for zeros in combinations(n, z_size) {
            bases_seen += 1;
            if bases_seen > MAX_BASES {
                return Err(LpError::TooLarge);
            }
            if let Some(cand) = solve_basis(rows, tight, &zeros) {
                if feasible(rows, &cand) {
                    let better = match &best {
                        None => true,
                        Some(b) => cand.slack > b.slack + 0.0,
                    };
                    if better {
                        best = Some(cand);
                    }
                }
            }
        }
    }
    Ok(best.expect("simplex is compact, some basis is feasible"))
}

fn feasible(rows: &[Vec<f64>], cand: &MaxSlack) -> bool {
    if cand.p.iter().any(|&x| x < -FEAS_TOL) {
        return false;
    }
    let sum: f64 = cand.p.iter().sum();
    if (sum - 1.0).abs() > 1e-7 {
        return false;
    }
    rows.iter().all(|row| dot(row, &cand.p) >= cand.slack - 1e-7)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Solve the square system for a candidate basis: rows in `tight` are
/// equalities `c_k . p - t = 0`, coordinates in `zeros` are pinned to 0 and
/// the simplex constraint closes the system.
fn solve_basis(rows: &[Vec<f64>], tight: &[usize], zeros: &[usize]) -> Option<MaxSlack> {
    let n = rows[0].len();
    let dim = n + 1;
    let mut a = vec![vec![0.0; dim]; dim];
    let mut b = vec![0.0; dim];
    let mut eq = 0;
    for &k in tight {
        for i in 0..n {
            a[eq][i] = rows[k][i];
        }
        a[eq][n] = -1.0;
        eq += 1;
    }
    for &z in zeros {
        a[eq][z] = 1.0;
        eq += 1;
    }
    for i in 0..n {
        a[eq][i] = 1.0;
    }
    b[eq] = 1.0;

    let x = gauss_solve(&mut a, &mut b)?;
    let p = x[..n].to_vec();
    Some(MaxSlack { p, slack: x[n] })
}

fn gauss_solve(a: &mut [Vec<f64>], b: &mut [f64]) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let mut pivot = col;
        for row in (col + 1)..n {
            if a[row][col].abs() > a[pivot][col].abs() {
                pivot = row;
            }
        }
        if a[pivot][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in (col + 1)..n {
            let f = a[row][col] / a[col][col];
            if f == 0.0 {
                continue;
            }
            for c in col..n {
                a[row][c] -= f * a[col][c];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for c in (row + 1)..n {
            acc -= a[row][c] * x[c];
        }
        x[row] = acc / a[row][row];
    }
    Some(x)
}

/// All subsets of `0..m` with size between 0 and `cap`, in deterministic order.
fn subsets_up_to(m: usize, cap: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for size in 0..=cap {
        out.extend(combinations(m, size));
    }
    out
}

/// k-combinations of `0..n` in lexicographic order.
fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        if k == 0 {
            return out;
        }
        // advance
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] + 1 <= n - (k - i) {
                idx[i] += 1;
                for j in (i + 1)..k {
                    idx[j] = idx[j - 1] + 1;
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
    fn matrix_game_value() {
        // max_p min(p1 - p2, p2 - p1) attains 0 at (1/2, 1/2)
        let rows = vec![vec![1.0, -1.0], vec![-1.0, 1.0]];
        let sol = max_min_slack(&rows).unwrap();
        assert!((sol.slack - 0.0).abs() < 1e-9);
        assert!((sol.p[0] - 0.5).abs() < 1e-9);
    }

    #[test]
    fn infeasible_chain_has_negative_slack() {
        // both rows are strictly negative everywhere
        let rows = vec![vec![-1.0, -2.0], vec![-3.0, -0.5]];
        let sol = max_min_slack(&rows).unwrap();
        assert!(sol.slack < -0.49);
    }

    #[test]
    fn single_row_reduces_to_max_coordinate() {
        let rows = vec![vec![0.3, 0.7, -0.2]];
        let sol = max_min_slack(&rows).unwrap();
        assert!((sol.slack - 0.7).abs() < 1e-9);
        assert!((sol.p[1] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn no_rows_is_unbounded() {
        let sol = max_min_slack(&[]).unwrap();
        assert!(sol.slack.is_infinite());
    }

    #[test]
    fn combinations_are_lexicographic() {
        let c = combinations(4, 2);
        assert_eq!(c.len(), 6);
        assert_eq!(c[0], vec![0, 1]);
        assert_eq!(c[5], vec![2, 3]);
        assert_eq!(combinations(3, 0), vec![Vec::<usize>::new()]);
    }
}
