//! Preference sorting and crowding distance over per-target fitness vectors.

/// `a` dominates `b`: no worse on every objective, better on one.
pub fn dominates(a: &[f64], b: &[f64]) -> bool {
    let mut better = false;
    for (x, y) in a.iter().zip(b) {
        if x > y {
            return false;
        }
        if x < y {
            better = true;
        }
    }
    better
}

/// Ranks individuals given `fitness[i][t]` for each active target `t`.
/// Front 0 holds, per target, the individual with the lowest fitness (ties
/// go to the shorter test, then the lower index); the rest are ranked by
/// non-dominated sorting.
pub fn preference_sort(fitness: &[Vec<f64>], lengths: &[usize]) -> Vec<Vec<usize>> {
    let n = fitness.len();
    let targets = fitness.first().map_or(0, Vec::len);
    let mut in_front0 = vec![false; n];
    let mut front0 = Vec::new();
    for t in 0..targets {
        let best = (0..n)
            .min_by(|&a, &b| {
                fitness[a][t]
                    .total_cmp(&fitness[b][t])
                    .then(lengths[a].cmp(&lengths[b]))
                    .then(a.cmp(&b))
            })
            .expect("non-empty population");
        if !in_front0[best] {
            in_front0[best] = true;
            front0.push(best);
        }
    }
    front0.sort_unstable();
    let mut fronts = Vec::new();
    if !front0.is_empty() {
        fronts.push(front0);
    }
    let rest: Vec<usize> = (0..n).filter(|i| !in_front0[*i]).collect();
    fronts.extend(non_dominated_sort(fitness, &rest));
    fronts
}

/// Fast non-dominated sorting of the individuals in `members`.
pub fn non_dominated_sort(fitness: &[Vec<f64>], members: &[usize]) -> Vec<Vec<usize>> {
    let m = members.len();
    let mut dominated_by = vec![0usize; m];
    let mut dominates_list: Vec<Vec<usize>> = vec![Vec::new(); m];
    for i in 0..m {
        for j in (i + 1)..m {
            let (a, b) = (&fitness[members[i]], &fitness[members[j]]);
            if dominates(a, b) {
                dominates_list[i].push(j);
                dominated_by[j] += 1;
            } else if dominates(b, a) {
                dominates_list[j].push(i);
                dominated_by[i] += 1;
            }
        }
    }
    let mut fronts = Vec::new();
    let mut current: Vec<usize> = (0..m).filter(|i| dominated_by[*i] == 0).collect();
    while !current.is_empty() {
        let mut next = Vec::new();
        for &i in &current {
            for &j in &dominates_list[i] {
                dominated_by[j] -= 1;
                if dominated_by[j] == 0 {
                    next.push(j);
                }
            }
        }
        next.sort_unstable();
        fronts.push(current.iter().map(|&i| members[i]).collect());
        current = next;
    }
    fronts
}

/// Crowding distance of each member of `front` (same order).
pub fn crowding_distance(fitness: &[Vec<f64>], front: &[usize]) -> Vec<f64> {
    let k = front.len();
    let mut dist = vec![0.0; k];
    if k <= 2 {
        return vec![f64::INFINITY; k];
    }
    let targets = fitness[front[0]].len();
    let mut order: Vec<usize> = (0..k).collect();
    for t in 0..targets {
        order.sort_by(|&a, &b| fitness[front[a]][t].total_cmp(&fitness[front[b]][t]).then(a.cmp(&b)));
        let lo = fitness[front[order[0]]][t];
        let hi = fitness[front[order[k - 1]]][t];
        dist[order[0]] = f64::INFINITY;
        dist[order[k - 1]] = f64::INFINITY;
        if hi - lo <= 0.0 {
            continue;
        }
        for w in 1..k - 1 {
            let prev = fitness[front[order[w - 1]]][t];
            let next = fitness[front[order[w + 1]]][t];
            dist[order[w]] += (next - prev) / (hi - lo);
        }
    }
    dist
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn four_individuals_two_targets() {
        let f = vec![
            vec![0.2, 0.9],
            vec![0.9, 0.2],
            vec![0.5, 0.5],
            vec![1.0, 1.0],
        ];
        let fronts = preference_sort(&f, &[3, 3, 3, 3]);
        assert_eq!(fronts, vec![vec![0, 1], vec![2], vec![3]]);
    }

    #[test]
    fn single_target_front_zero_is_the_best() {
        let f = vec![vec![0.7], vec![0.3], vec![0.3], vec![0.9]];
        let fronts = preference_sort(&f, &[5, 6, 4, 1]);
        assert_eq!(fronts[0], vec![2]);
    }

    #[test]
    fn dominance_is_strict() {
        assert!(dominates(&[0.1, 0.2], &[0.1, 0.3]));
        assert!(!dominates(&[0.1, 0.2], &[0.1, 0.2]));
        assert!(!dominates(&[0.1, 0.4], &[0.2, 0.3]));
    }

    #[test]
    fn crowding_boundaries_are_infinite() {
        let f = vec![vec![0.0, 1.0], vec![0.5, 0.5], vec![1.0, 0.0], vec![0.25, 0.75]];
        let d = crowding_distance(&f, &[0, 1, 2, 3]);
        assert!(d[0].is_infinite() && d[2].is_infinite());
        assert!(d[1].is_finite() && d[3].is_finite());
    }
}
