//! The fixed control strategy: Hungarian target assignment plus angle
//! tracking.
//!
//! The same strategy drives both the physical and the digital environment
//! (one code path), so trajectory differences between the two reflect
//! parameter differences rather than controller differences. Everything
//! here is a pure function of its inputs: ties in the assignment are broken
//! deterministically toward the lexicographically smallest pair list.

use crate::env::{wrap_angle, WorldLayout};
use crate::error::{Error, Result};
use crate::types::{ActionVector, StateVector};

/// A matching of turrets to targets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assignment {
    /// `(turret index, target index)` pairs, sorted by turret index.
    pub pairs: Vec<(usize, usize)>,
    /// Turrets left without a target (only when turrets outnumber targets).
    pub unassigned: Vec<usize>,
}

impl Assignment {
    /// Sum of the matrix entries selected by `pairs`.
    pub fn total_cost(&self, cost: &[Vec<f64>]) -> f64 {
        self.pairs.iter().map(|&(r, c)| cost[r][c]).sum()
    }
}

/// Jonker-Volgenant shortest augmenting path solver. Requires a non-empty
/// rectangular matrix with `rows <= cols` and finite entries; returns the
/// minimum total cost of a matching covering every row.
fn jv_min_cost(cost: &[Vec<f64>]) -> f64 {
    let n = cost.len();
    let m = cost[0].len();
    debug_assert!(n <= m);
    let mut u = vec![0.0f64; n + 1];
    let mut v = vec![0.0f64; m + 1];
    // p[j] = 1-based row matched to column j; column 0 is the virtual start.
    let mut p = vec![0usize; m + 1];
    let mut way = vec![0usize; m + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![f64::INFINITY; m + 1];
        let mut used = vec![false; m + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0usize;
            for j in 1..=m {
                if !used[j] {
                    let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=m {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    (1..=m)
        .filter(|&j| p[j] != 0)
        .map(|j| cost[p[j] - 1][j - 1])
        .sum()
}

/// Minimum matching cost over the given row/column subsets of `cost`.
/// The matching size is `min(rows.len(), cols.len())`.
fn min_cost_sub(cost: &[Vec<f64>], rows: &[usize], cols: &[usize]) -> f64 {
    if rows.is_empty() || cols.is_empty() {
        return 0.0;
    }
    let sub: Vec<Vec<f64>> = if rows.len() <= cols.len() {
        rows.iter()
            .map(|&i| cols.iter().map(|&j| cost[i][j]).collect())
            .collect()
    } else {
        cols.iter()
            .map(|&j| rows.iter().map(|&i| cost[i][j]).collect())
            .collect()
    };
    jv_min_cost(&sub)
}

/// Minimum-cost assignment of rows (turrets) to columns (targets).
///
/// Returns a matching of size `min(rows, cols)`. Among all minimum-cost
/// matchings the lexicographically smallest pair list wins: rows are fixed
/// in order, each taking the smallest column index consistent with the
/// optimal total.
pub fn hungarian(cost: &[Vec<f64>]) -> Result<Assignment> {
    let rows = cost.len();
    let cols = cost.first().map_or(0, |r| r.len());
    for row in cost {
        if row.len() != cols {
            return Err(Error::invalid("cost matrix must be rectangular"));
        }
        if let Some(bad) = row.iter().find(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("cost entries must be finite, got {bad}")));
        }
    }
    if rows == 0 || cols == 0 {
        return Ok(Assignment {
            pairs: Vec::new(),
            unassigned: (0..rows).collect(),
        });
    }

    let target = rows.min(cols);
    let all_rows: Vec<usize> = (0..rows).collect();
    let mut live_cols: Vec<usize> = (0..cols).collect();
    let mut remaining = min_cost_sub(cost, &all_rows, &live_cols);
    let mut pairs = Vec::with_capacity(target);
    let mut unassigned = Vec::new();

    for row in 0..rows {
        if pairs.len() == target {
            unassigned.extend(row..rows);
            break;
        }
        let rest_rows: Vec<usize> = (row + 1..rows).collect();
        let tol = 1e-9 * (1.0 + remaining.abs());
        let mut chosen = None;
        for (pos, &col) in live_cols.iter().enumerate() {
            let rest_cols: Vec<usize> = live_cols
                .iter()
                .copied()
                .filter(|&c| c != col)
                .collect();
            let completion = min_cost_sub(cost, &rest_rows, &rest_cols);
            if cost[row][col] + completion <= remaining + tol {
                chosen = Some((pos, col, completion));
                break;
            }
        }
        match chosen {
            Some((pos, col, completion)) => {
                pairs.push((row, col));
                live_cols.remove(pos);
                remaining = completion;
            }
            // No column keeps the optimum: this row sits out, which is only
            // possible while turrets outnumber targets.
            None => unassigned.push(row),
        }
    }

    Ok(Assignment { pairs, unassigned })
}

/// Azimuth/pitch a turret must hold to face a target position.
/// Azimuth lies in `[-pi, pi)`, pitch in `[-pi/2, pi/2]`.
pub fn aim_angles(from: &[f64; 3], to: &[f64; 3]) -> Result<(f64, f64)> {
    let dx = to[0] - from[0];
    let dy = to[1] - from[1];
    let dz = to[2] - from[2];
    if dx == 0.0 && dy == 0.0 && dz == 0.0 {
        return Err(Error::invalid("cannot aim at a coincident position"));
    }
    let azimuth = wrap_angle(dy.atan2(dx));
    let pitch = dz.atan2((dx * dx + dy * dy).sqrt());
    Ok((azimuth, pitch))
}

fn distance(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    let d = [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
    (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt()
}

/// The known strategy: assign turrets to live targets by minimum total
/// distance, then command each assigned turret to face its target.
/// Unassigned turrets hold their current angles.
#[derive(Debug, Clone)]
pub struct HungarianStrategy {
    layout: WorldLayout,
}

impl HungarianStrategy {
    pub fn new(layout: WorldLayout) -> Self {
        HungarianStrategy { layout }
    }

    pub fn layout(&self) -> &WorldLayout {
        &self.layout
    }

    /// Computes the commanded angles for one step. A pure function of the
    /// observed state and the liveness mask.
    pub fn act(&self, state: &StateVector, live: &[bool]) -> Result<ActionVector> {
        let decoded = self.layout.decode_state(state)?;
        if live.len() != self.layout.boss_count {
            return Err(Error::invalid(format!(
                "liveness mask has {} entries for {} targets",
                live.len(),
                self.layout.boss_count
            )));
        }

        // Default: hold.
        let mut cmd = Vec::with_capacity(self.layout.action_dim());
        for &(az, pitch) in &decoded.turret_angles {
            cmd.push(az);
            cmd.push(pitch);
        }

        let live_idx: Vec<usize> = (0..live.len()).filter(|&b| live[b]).collect();
        if !live_idx.is_empty() && !self.layout.turret_positions.is_empty() {
            let cost: Vec<Vec<f64>> = self
                .layout
                .turret_positions
                .iter()
                .map(|tp| {
                    live_idx
                        .iter()
                        .map(|&b| distance(tp, &decoded.boss_positions[b]))
                        .collect()
                })
                .collect();
            let assignment = hungarian(&cost)?;
            for &(t, j) in &assignment.pairs {
                let boss = &decoded.boss_positions[live_idx[j]];
                // A target sitting exactly on the turret cannot be aimed at;
                // hold instead.
                if let Ok((az, pitch)) = aim_angles(&self.layout.turret_positions[t], boss) {
                    cmd[2 * t] = az;
                    cmd[2 * t + 1] = pitch;
                }
            }
        }

        ActionVector::new(cmd)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn matrix(rows: &[&[f64]]) -> Vec<Vec<f64>> {
        rows.iter().map(|r| r.to_vec()).collect()
    }

    #[test]
    fn zero_cost_diagonal() {
        let a = hungarian(&matrix(&[&[0.0, 1.0], &[1.0, 0.0]])).unwrap();
        assert_eq!(a.pairs, vec![(0, 0), (1, 1)]);
        assert!(a.unassigned.is_empty());
    }

    #[test]
    fn two_by_two_off_diagonal() {
        let cost = matrix(&[&[4.0, 1.0], &[2.0, 3.0]]);
        let a = hungarian(&cost).unwrap();
        assert_eq!(a.pairs, vec![(0, 1), (1, 0)]);
        assert_eq!(a.total_cost(&cost), 3.0);
    }

    #[test]
    fn wide_matrix_leaves_columns_out() {
        let cost = matrix(&[&[1.0, 2.0, 9.0], &[2.0, 1.0, 9.0]]);
        let a = hungarian(&cost).unwrap();
        assert_eq!(a.pairs, vec![(0, 0), (1, 1)]);
        assert_eq!(a.total_cost(&cost), 2.0);
    }

    #[test]
    fn tall_matrix_leaves_rows_out() {
        let cost = matrix(&[&[5.0], &[1.0], &[3.0]]);
        let a = hungarian(&cost).unwrap();
        assert_eq!(a.pairs, vec![(1, 0)]);
        assert_eq!(a.unassigned, vec![0, 2]);
    }

    #[test]
    fn ties_break_toward_the_smallest_pair_list() {
        let a = hungarian(&matrix(&[&[1.0, 1.0], &[1.0, 1.0]])).unwrap();
        assert_eq!(a.pairs, vec![(0, 0), (1, 1)]);

        let a = hungarian(&matrix(&[&[5.0], &[5.0]])).unwrap();
        assert_eq!(a.pairs, vec![(0, 0)]);
        assert_eq!(a.unassigned, vec![1]);
    }

    #[test]
    fn invalid_matrices_are_rejected() {
        assert!(hungarian(&matrix(&[&[1.0, f64::NAN]])).is_err());
        assert!(hungarian(&matrix(&[&[1.0, f64::INFINITY]])).is_err());
        assert!(hungarian(&[vec![1.0, 2.0], vec![1.0]]).is_err());
    }

    #[test]
    fn empty_matrices_yield_empty_assignments() {
        let a = hungarian(&[]).unwrap();
        assert!(a.pairs.is_empty() && a.unassigned.is_empty());

        let a = hungarian(&[vec![], vec![]]).unwrap();
        assert!(a.pairs.is_empty());
        assert_eq!(a.unassigned, vec![0, 1]);
    }

    #[test]
    fn aim_angles_axis_cases() {
        let origin = [0.0; 3];
        assert_eq!(aim_angles(&origin, &[1.0, 0.0, 0.0]).unwrap(), (0.0, 0.0));
        let (az, pitch) = aim_angles(&origin, &[0.0, 1.0, 0.0]).unwrap();
        assert!((az - FRAC_PI_2).abs() < 1e-15);
        assert_eq!(pitch, 0.0);
        let (az, pitch) = aim_angles(&origin, &[1.0, 0.0, 1.0]).unwrap();
        assert_eq!(az, 0.0);
        assert!((pitch - FRAC_PI_4).abs() < 1e-15);
        assert!(aim_angles(&origin, &origin).is_err());
    }

    fn layout_1v1() -> WorldLayout {
        WorldLayout {
            turret_positions: vec![[0.0; 3]],
            boss_count: 1,
        }
    }

    #[test]
    fn act_aims_a_single_turret_at_a_single_boss() {
        let strategy = HungarianStrategy::new(layout_1v1());
        let state = StateVector::new(vec![0.3, 0.1, 4.0, 0.0, 3.0]).unwrap();
        let action = strategy.act(&state, &[true]).unwrap();
        let expected = aim_angles(&[0.0; 3], &[4.0, 0.0, 3.0]).unwrap();
        assert_eq!(action.values(), &[expected.0, expected.1]);
    }

    #[test]
    fn act_holds_when_no_target_is_live() {
        let strategy = HungarianStrategy::new(layout_1v1());
        let state = StateVector::new(vec![0.3, 0.1, 4.0, 0.0, 3.0]).unwrap();
        let action = strategy.act(&state, &[false]).unwrap();
        assert_eq!(action.values(), &[0.3, 0.1]);
    }

    #[test]
    fn act_picks_the_distance_minimal_pairing() {
        // Turret 0 near boss 1, turret 1 near boss 0: the crossed pairing
        // is cheaper than the aligned one.
        let layout = WorldLayout {
            turret_positions: vec![[0.0, 0.0, 0.0], [10.0, 0.0, 0.0]],
            boss_count: 2,
        };
        let strategy = HungarianStrategy::new(layout);
        let state = StateVector::new(vec![
            0.0, 0.0, 0.0, 0.0, // angles
            9.0, 1.0, 0.0, // boss 0 (near turret 1)
            1.0, 1.0, 0.0, // boss 1 (near turret 0)
        ])
        .unwrap();
        let action = strategy.act(&state, &[true, true]).unwrap();
        let aim0 = aim_angles(&[0.0, 0.0, 0.0], &[1.0, 1.0, 0.0]).unwrap();
        let aim1 = aim_angles(&[10.0, 0.0, 0.0], &[9.0, 1.0, 0.0]).unwrap();
        assert_eq!(action.values(), &[aim0.0, aim0.1, aim1.0, aim1.1]);
    }

    #[test]
    fn act_is_deterministic() {
        let strategy = HungarianStrategy::new(layout_1v1());
        let state = StateVector::new(vec![0.0, 0.0, 5.0, 5.0, 5.0]).unwrap();
        let a = strategy.act(&state, &[true]).unwrap();
        let b = strategy.act(&state, &[true]).unwrap();
        assert_eq!(a, b);
    }

    mod proptests {
        use super::*;
        use proptest::prelude::*;

        fn brute_force_min(cost: &[Vec<f64>]) -> f64 {
            let rows = cost.len();
            let cols = cost[0].len();
            if rows > cols {
                let t: Vec<Vec<f64>> = (0..cols)
                    .map(|j| (0..rows).map(|i| cost[i][j]).collect())
                    .collect();
                return brute_force_min(&t);
            }
            fn rec(cost: &[Vec<f64>], row: usize, used: &mut Vec<bool>, acc: f64, best: &mut f64) {
                if row == cost.len() {
                    if acc < *best {
                        *best = acc;
                    }
                    return;
                }
                for (col, u) in used.clone().iter().enumerate() {
                    if !u {
                        used[col] = true;
                        rec(cost, row + 1, used, acc + cost[row][col], best);
                        used[col] = false;
                    }
                }
            }
            let mut best = f64::INFINITY;
            rec(cost, 0, &mut vec![false; cols], 0.0, &mut best);
            best
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(128))]

            #[test]
            fn hungarian_matches_brute_force(
                rows in 1..4usize,
                cols in 1..4usize,
                entries in proptest::collection::vec(0u8..100, 16),
            ) {
                let cost: Vec<Vec<f64>> = (0..rows)
                    .map(|i| (0..cols).map(|j| entries[i * 4 + j] as f64).collect())
                    .collect();
                let a = hungarian(&cost).unwrap();
                prop_assert_eq!(a.pairs.len(), rows.min(cols));
                // Integer-valued entries make both sums exact.
                prop_assert_eq!(a.total_cost(&cost), brute_force_min(&cost));
            }
        }
    }
}
