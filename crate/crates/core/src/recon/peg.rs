//! Progressive edge growth for multi-edge-type ensembles.
//!
//! Node counts per class come from largest-remainder rounding. Check sockets
//! of each edge type are then nudged one at a time so both sides of every
//! type carry the same number of edges. Variables are placed in order of
//! increasing degree; each new edge of type `j` goes to a check with a free
//! type-`j` socket that is farthest from the variable in the current graph,
//! preferring checks with more free sockets and then a seeded random pick.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::degree::{DegreeClass, DegreeDistribution};
use super::matrix::ParityCheckMatrix;
use crate::error::{Error, Result};

/// Splits `total` nodes over `fractions` by largest remainder.
pub fn round_counts(fractions: &[f64], total: usize) -> Vec<usize> {
    let sum: f64 = fractions.iter().sum();
    let exact: Vec<f64> = fractions.iter().map(|f| f / sum * total as f64).collect();
    let mut counts: Vec<usize> = exact.iter().map(|e| e.floor() as usize).collect();
    let assigned: usize = counts.iter().sum();
    let mut order: Vec<usize> = (0..fractions.len()).collect();
    order.sort_by(|&a, &b| {
        let ra = exact[a] - exact[a].floor();
        let rb = exact[b] - exact[b].floor();
        rb.total_cmp(&ra).then(a.cmp(&b))
    });
    for &i in order.iter().take(total.saturating_sub(assigned)) {
        counts[i] += 1;
    }
    counts
}

fn expand(classes: &[DegreeClass], counts: &[usize], types: usize) -> Vec<Vec<u32>> {
    classes
        .iter()
        .zip(counts)
        .flat_map(|(c, &k)| {
            let mut d = c.degrees.clone();
            d.resize(types, 0);
            std::iter::repeat_n(d, k)
        })
        .collect()
}

fn infeasible(msg: String) -> Error {
    Error::InfeasibleDistribution(msg)
}

pub fn peg_construct(dist: &DegreeDistribution, n_vars: usize, seed: u64) -> Result<ParityCheckMatrix> {
    let code_id = format!("peg-r{:.4}-n{n_vars}-s{seed}", dist.code_rate);
    peg_construct_named(dist, n_vars, seed, code_id)
}

pub fn peg_construct_named(
    dist: &DegreeDistribution,
    n_vars: usize,
    seed: u64,
    code_id: impl Into<String>,
) -> Result<ParityCheckMatrix> {
    if n_vars < 2 {
        return Err(infeasible(format!("n_vars = {n_vars} is too small")));
    }
    let types = dist.edge_types();
    let n_checks = (dist.check_ratio() * n_vars as f64).round() as usize;
    if n_checks == 0 || n_checks >= n_vars {
        return Err(infeasible(format!(
            "{n_checks} checks for {n_vars} variables cannot realise rate {}",
            dist.code_rate
        )));
    }
    let var_fracs: Vec<f64> = dist.variable_spec.iter().map(|c| c.fraction).collect();
    let chk_fracs: Vec<f64> = dist.check_spec.iter().map(|c| c.fraction).collect();
    let var_deg = expand(&dist.variable_spec, &round_counts(&var_fracs, n_vars), types);
    let mut chk_deg = expand(&dist.check_spec, &round_counts(&chk_fracs, n_checks), types);

    // Balance sockets per edge type on the check side.
    for j in 0..types {
        let need: i64 = var_deg.iter().map(|d| d[j] as i64).sum();
        let have: i64 = chk_deg.iter().map(|d| d[j] as i64).sum();
        let holders: Vec<usize> = (0..n_checks).filter(|&c| chk_deg[c][j] > 0).collect();
        if need > 0 && holders.is_empty() {
            return Err(infeasible(format!("no check node accepts edge type {}", j + 1)));
        }
        let mut diff = need - have;
        let mut k = 0usize;
        let mut stalled = 0usize;
        while diff != 0 {
            let c = holders[k % holders.len()];
            k += 1;
            if diff > 0 {
                chk_deg[c][j] += 1;
                diff -= 1;
                stalled = 0;
            } else if chk_deg[c][j] > 1 {
                chk_deg[c][j] -= 1;
                diff += 1;
                stalled = 0;
            } else {
                stalled += 1;
                if stalled > holders.len() {
                    return Err(infeasible(format!(
                        "edge type {}: {} check sockets cannot shrink to {need}",
                        j + 1,
                        need - diff
                    )));
                }
            }
        }
        let widest = var_deg.iter().map(|d| d[j] as usize).max().unwrap_or(0);
        if widest > holders.len() {
            return Err(infeasible(format!(
                "a variable needs {widest} edges of type {} but only {} checks accept that type",
                j + 1,
                holders.len()
            )));
        }
    }
    let widest = var_deg.iter().map(|d| d.iter().sum::<u32>() as usize).max().unwrap_or(0);
    if widest > n_checks {
        return Err(infeasible(format!(
            "variable degree {widest} exceeds the {n_checks} available checks"
        )));
    }

    let mut builder = Builder::new(n_vars, n_checks, chk_deg, types, seed);
    let mut order: Vec<usize> = (0..n_vars).collect();
    order.sort_by_key(|&v| (var_deg[v].iter().sum::<u32>(), v));
    for v in order {
        for (j, &d) in var_deg[v].iter().enumerate() {
            for _ in 0..d {
                builder.place(v, j)?;
            }
        }
    }
    ParityCheckMatrix::new(code_id, n_vars, builder.check_adj)
}

struct Builder {
    var_adj: Vec<Vec<u32>>,
    check_adj: Vec<Vec<u32>>,
    /// Free sockets per edge type per check.
    free: Vec<Vec<u32>>,
    /// Number of checks with a free socket, per type.
    open: Vec<usize>,
    rng: ChaCha8Rng,
    check_seen: Vec<u32>,
    var_seen: Vec<u32>,
    epoch: u32,
}

impl Builder {
    fn new(n_vars: usize, n_checks: usize, chk_deg: Vec<Vec<u32>>, types: usize, seed: u64) -> Self {
        let free: Vec<Vec<u32>> = (0..types).map(|j| chk_deg.iter().map(|d| d[j]).collect()).collect();
        let open = free.iter().map(|f| f.iter().filter(|&&s| s > 0).count()).collect();
        Self {
            var_adj: vec![Vec::new(); n_vars],
            check_adj: vec![Vec::new(); n_checks],
            free,
            open,
            rng: ChaCha8Rng::seed_from_u64(seed),
            check_seen: vec![0; n_checks],
            var_seen: vec![0; n_vars],
            epoch: 0,
        }
    }

    fn place(&mut self, v: usize, j: usize) -> Result<()> {
        let chosen = if self.var_adj[v].is_empty() {
            self.pick(j, |_| true)
        } else {
            self.farthest(v, j)
        };
        let c = chosen.ok_or_else(|| {
            infeasible(format!("variable {v} found no free check socket of type {}", j + 1))
        })?;
        self.var_adj[v].push(c as u32);
        self.check_adj[c].push(v as u32);
        self.free[j][c] -= 1;
        if self.free[j][c] == 0 {
            self.open[j] -= 1;
        }
        Ok(())
    }

    /// Among open type-`j` checks accepted by `allow`, the one with the most
    /// free sockets; ties broken uniformly at random.
    fn pick(&mut self, j: usize, allow: impl Fn(usize) -> bool) -> Option<usize> {
        let mut best = None;
        let mut best_free = 0;
        let mut ties = 0u32;
        for (c, &f) in self.free[j].iter().enumerate() {
            if f == 0 || !allow(c) {
                continue;
            }
            if f > best_free {
                best_free = f;
                best = Some(c);
                ties = 1;
            } else if f == best_free {
                ties += 1;
                if self.rng.random_range(0..ties) == 0 {
                    best = Some(c);
                }
            }
        }
        best
    }

    fn next_epoch(&mut self) -> u32 {
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.check_seen.iter_mut().for_each(|s| *s = 0);
            self.var_seen.iter_mut().for_each(|s| *s = 0);
            self.epoch = 1;
        }
        self.epoch
    }

    /// Breadth-first expansion from `v` until every open type-`j` check is
    /// reached or the component is exhausted. Candidates are the open checks
    /// unreached at that point, or else those reached in the last layer.
    fn farthest(&mut self, v: usize, j: usize) -> Option<usize> {
        let epoch = self.next_epoch();
        self.var_seen[v] = epoch;
        let mut frontier: Vec<u32> = Vec::new();
        let mut reached_open = 0usize;
        for &c in &self.var_adj[v] {
            if self.check_seen[c as usize] != epoch {
                self.check_seen[c as usize] = epoch;
                frontier.push(c);
                if self.free[j][c as usize] > 0 {
                    reached_open += 1;
                }
            }
        }
        let total_open = self.open[j];
        let mut last_layer = frontier.clone();
        let mut next = Vec::new();
        while reached_open < total_open && !frontier.is_empty() {
            next.clear();
            for &c in &frontier {
                for &w in &self.check_adj[c as usize] {
                    if self.var_seen[w as usize] == epoch {
                        continue;
                    }
                    self.var_seen[w as usize] = epoch;
                    for &c2 in &self.var_adj[w as usize] {
                        if self.check_seen[c2 as usize] != epoch {
                            self.check_seen[c2 as usize] = epoch;
                            next.push(c2);
                            if self.free[j][c2 as usize] > 0 {
                                reached_open += 1;
                            }
                        }
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            std::mem::swap(&mut frontier, &mut next);
            last_layer.clone_from(&frontier);
        }

        let adjacent: Vec<u32> = self.var_adj[v].clone();
        if reached_open < total_open {
            let seen = std::mem::take(&mut self.check_seen);
            let out = self.pick(j, |c| seen[c] != epoch);
            self.check_seen = seen;
            return out;
        }
        // Every open check is reachable; use the deepest layer, or fall back
        // to any non-adjacent open check when that layer has none.
        let mut in_layer = vec![false; 0];
        if !last_layer.is_empty() {
            in_layer = vec![false; self.check_adj.len()];
            for &c in &last_layer {
                in_layer[c as usize] = true;
            }
        }
        let not_adjacent = |c: usize| !adjacent.contains(&(c as u32));
        let layer_pick = if in_layer.is_empty() {
            None
        } else {
            self.pick(j, |c| in_layer[c] && not_adjacent(c))
        };
        layer_pick.or_else(|| self.pick(j, not_adjacent))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn largest_remainder() {
        assert_eq!(round_counts(&[0.5, 0.5], 3), vec![2, 1]);
        assert_eq!(round_counts(&[0.0775, 0.0475, 0.875], 10_000), vec![775, 475, 8750]);
        assert_eq!(round_counts(&[0.2, 0.3, 0.5], 7).iter().sum::<usize>(), 7);
    }

    #[test]
    fn small_regular_code() {
        let d = DegreeDistribution::regular(3, 6).unwrap();
        let h = peg_construct(&d, 96, 3).unwrap();
        assert!(h.column_weights().iter().all(|&w| w == 3));
        assert!(h.row_weights().iter().all(|&w| w == 6));
        assert_eq!(h, peg_construct(&d, 96, 3).unwrap());
    }

    #[test]
    fn degree_beyond_check_count_is_infeasible() {
        let d = super::super::degree::published_ensemble(0.05).unwrap();
        assert!(matches!(peg_construct(&d, 10, 1), Err(Error::InfeasibleDistribution(_))));
    }
}
