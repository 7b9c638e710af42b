//! Maximum-weight one-to-one pairing between two small sets.

/// Rows and columns up to this size are paired by enumerating every
/// injective assignment; larger problems go to the Hungarian solver.
pub const EXHAUSTIVE_LIMIT: usize = 6;

/// A pairing of rows to columns. `pairs` holds `(row, col)` sorted by row;
/// it has exactly `min(rows, cols)` entries.
#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    pub pairs: Vec<(usize, usize)>,
    pub total: f64,
}

/// Pairs the rows and columns of `weights` to maximize the summed weight.
/// Every row has the same length; weights are finite.
pub fn max_weight_pairing(weights: &[Vec<f64>]) -> Assignment {
    let rows = weights.len();
    let cols = weights.first().map_or(0, Vec::len);
    if rows == 0 || cols == 0 {
        return Assignment {
            pairs: Vec::new(),
            total: 0.0,
        };
    }
    if rows <= EXHAUSTIVE_LIMIT && cols <= EXHAUSTIVE_LIMIT {
        exhaustive(weights)
    } else {
        hungarian(weights)
    }
}

/// Tries every injective map from the smaller side into the larger one.
/// Ties keep the lexicographically first assignment.
pub fn exhaustive(weights: &[Vec<f64>]) -> Assignment {
    let rows = weights.len();
    let cols = weights.first().map_or(0, Vec::len);
    let transpose = rows > cols;
    let (small, large) = if transpose { (cols, rows) } else { (rows, cols) };
    let w = |s: usize, l: usize| {
        if transpose {
            weights[l][s]
        } else {
            weights[s][l]
        }
    };

    let mut best: Option<(f64, Vec<usize>)> = None;
    let mut current = Vec::with_capacity(small);
    let mut used = vec![false; large];

    fn search(
        depth: usize,
        small: usize,
        large: usize,
        acc: f64,
        current: &mut Vec<usize>,
        used: &mut [bool],
        best: &mut Option<(f64, Vec<usize>)>,
        w: &dyn Fn(usize, usize) -> f64,
    ) {
        if depth == small {
            if best.as_ref().is_none_or(|(b, _)| acc > *b) {
                *best = Some((acc, current.clone()));
            }
            return;
        }
        for l in 0..large {
            if used[l] {
                continue;
            }
            used[l] = true;
            current.push(l);
            search(depth + 1, small, large, acc + w(depth, l), current, used, best, w);
            current.pop();
            used[l] = false;
        }
    }

    search(0, small, large, 0.0, &mut current, &mut used, &mut best, &w);
    let (total, choice) = best.unwrap_or((0.0, Vec::new()));
    let mut pairs: Vec<(usize, usize)> = choice
        .into_iter()
        .enumerate()
        .map(|(s, l)| if transpose { (l, s) } else { (s, l) })
        .collect();
    pairs.sort_unstable();
    Assignment { pairs, total }
}

/// Shortest-augmenting-path Hungarian algorithm, O(n^2 m) for an n x m
/// matrix with n <= m (the matrix is transposed otherwise).
pub fn hungarian(weights: &[Vec<f64>]) -> Assignment {
    let rows = weights.len();
    let cols = weights.first().map_or(0, Vec::len);
    if rows == 0 || cols == 0 {
        return Assignment {
            pairs: Vec::new(),
            total: 0.0,
        };
    }
    let transpose = rows > cols;
    let (n, m) = if transpose { (cols, rows) } else { (rows, cols) };
    // Minimize negated weights.
    let cost = |i: usize, j: usize| {
        if transpose {
            -weights[j][i]
        } else {
            -weights[i][j]
        }
    };

    // 1-based potentials; column 0 is a virtual start.
    let mut u = vec![0.0f64; n + 1];
    let mut v = vec![0.0f64; m + 1];
    let mut owner = vec![0usize; m + 1];
    let mut way = vec![0usize; m + 1];

    for i in 1..=n {
        owner[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![f64::INFINITY; m + 1];
        let mut used = vec![false; m + 1];
        loop {
            used[j0] = true;
            let i0 = owner[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0usize;
            for j in 1..=m {
                if used[j] {
                    continue;
                }
                let reduced = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if reduced < minv[j] {
                    minv[j] = reduced;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=m {
                if used[j] {
                    u[owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if owner[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            owner[j0] = owner[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut pairs = Vec::with_capacity(n);
    for j in 1..=m {
        if owner[j] != 0 {
            let (i, j) = (owner[j] - 1, j - 1);
            pairs.push(if transpose { (j, i) } else { (i, j) });
        }
    }
    pairs.sort_unstable();
    let total = pairs.iter().map(|&(r, c)| weights[r][c]).sum();
    Assignment { pairs, total }
}
