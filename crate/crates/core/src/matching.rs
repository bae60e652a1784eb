//! Exact minimum-cost assignment of rule entities onto sample entities.
//!
//! Solved as a min-cost flow with successive shortest paths (Bellman-Ford,
//! since column bonuses make some arc costs negative). Each column `j` has a
//! "first use" arc of cost `-bonus[j]`; when sharing is allowed it also has an
//! uncapacitated arc of cost 0, so the per-column cost is convex and the flow
//! optimum is exact for both the one-to-one and the many-to-one problem.

#[derive(Clone, Copy, Debug)]
struct Arc {
    to: usize,
    cap: i64,
    cost: i64,
}

struct FlowGraph {
    arcs: Vec<Arc>,
    adjacency: Vec<Vec<usize>>,
}

impl FlowGraph {
    fn new(nodes: usize) -> Self {
        FlowGraph {
            arcs: Vec::new(),
            adjacency: vec![Vec::new(); nodes],
        }
    }

    fn add_arc(&mut self, from: usize, to: usize, cap: i64, cost: i64) -> usize {
        let id = self.arcs.len();
        self.arcs.push(Arc { to, cap, cost });
        self.adjacency[from].push(id);
        self.arcs.push(Arc {
            to: from,
            cap: 0,
            cost: -cost,
        });
        self.adjacency[to].push(id + 1);
        id
    }

    /// Cheapest residual path from `source` to `sink`, as the arc ids to push along.
    fn shortest_path(&self, source: usize, sink: usize) -> Option<Vec<usize>> {
        let n = self.adjacency.len();
        let mut dist = vec![i64::MAX; n];
        let mut via: Vec<Option<usize>> = vec![None; n];
        dist[source] = 0;
        // Residual graph of a successive-shortest-path run has no negative cycles.
        for _ in 0..n {
            let mut relaxed = false;
            for u in 0..n {
                if dist[u] == i64::MAX {
                    continue;
                }
                for &a in &self.adjacency[u] {
                    let arc = self.arcs[a];
                    if arc.cap > 0 && dist[u] + arc.cost < dist[arc.to] {
                        dist[arc.to] = dist[u] + arc.cost;
                        via[arc.to] = Some(a);
                        relaxed = true;
                    }
                }
            }
            if !relaxed {
                break;
            }
        }
        if dist[sink] == i64::MAX {
            return None;
        }
        let mut path = Vec::new();
        let mut node = sink;
        while node != source {
            let a = via[node]?;
            path.push(a);
            node = self.arcs[a ^ 1].to;
        }
        Some(path)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Assignment {
    /// Column chosen for each row.
    pub columns: Vec<usize>,
    /// `Σ weight(row, column) - Σ bonus(column used at least once)`.
    pub cost: i64,
}

/// Assigns every row to a column with an allowed edge (`weights[r][c]` is
/// `Some`), minimising total weight minus the bonus of each used column.
///
/// With `share_columns == false` each column takes at most one row; returns
/// `None` if no such assignment saturates all rows.
pub(crate) fn min_cost_assignment(
    weights: &[Vec<Option<i64>>],
    bonus: &[i64],
    share_columns: bool,
) -> Option<Assignment> {
    let rows = weights.len();
    let cols = bonus.len();
    let source = 0;
    let sink = rows + cols + 1;
    let mut g = FlowGraph::new(rows + cols + 2);

    for r in 0..rows {
        g.add_arc(source, 1 + r, 1, 0);
    }
    let mut edge_arcs = Vec::new();
    for (r, row) in weights.iter().enumerate() {
        for (c, w) in row.iter().enumerate() {
            if let Some(w) = *w {
                let id = g.add_arc(1 + r, 1 + rows + c, 1, w);
                edge_arcs.push((r, c, id));
            }
        }
    }
    for (c, &b) in bonus.iter().enumerate() {
        g.add_arc(1 + rows + c, sink, 1, -b);
        if share_columns && rows > 1 {
            g.add_arc(1 + rows + c, sink, rows as i64 - 1, 0);
        }
    }

    for _ in 0..rows {
        let path = g.shortest_path(source, sink)?;
        for a in path {
            g.arcs[a].cap -= 1;
            g.arcs[a ^ 1].cap += 1;
        }
    }

    let mut columns = vec![usize::MAX; rows];
    let mut cost = 0;
    let mut used = vec![false; cols];
    for (r, c, id) in edge_arcs {
        if g.arcs[id].cap == 0 {
            columns[r] = c;
            cost += g.arcs[id].cost;
            used[c] = true;
        }
    }
    cost -= used
        .iter()
        .zip(bonus)
        .filter(|(u, _)| **u)
        .map(|(_, b)| b)
        .sum::<i64>();
    Some(Assignment { columns, cost })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classic_assignment() {
        let w = vec![
            vec![Some(4), Some(1), Some(3)],
            vec![Some(2), Some(0), Some(5)],
            vec![Some(3), Some(2), Some(2)],
        ];
        let a = min_cost_assignment(&w, &[0, 0, 0], false).unwrap();
        assert_eq!(a.cost, 5);
        assert_eq!(a.columns, vec![1, 0, 2]);
    }

    #[test]
    fn hall_violation_is_infeasible_without_sharing() {
        let w = vec![vec![Some(1)], vec![Some(1)]];
        assert!(min_cost_assignment(&w, &[0], false).is_none());
        let a = min_cost_assignment(&w, &[0], true).unwrap();
        assert_eq!(a.columns, vec![0, 0]);
        assert_eq!(a.cost, 2);
    }

    #[test]
    fn bonus_pulls_rows_onto_distinct_columns() {
        // Row 0 is cheaper on column 0, but column 1 carries a larger bonus.
        let w = vec![vec![Some(2), Some(3)], vec![Some(2), None], vec![Some(2), None]];
        let a = min_cost_assignment(&w, &[3, 4], true).unwrap();
        assert_eq!(a.columns, vec![1, 0, 0]);
        assert_eq!(a.cost, 3 + 2 + 2 - 3 - 4);
    }

    #[test]
    fn no_rows() {
        let a = min_cost_assignment(&[], &[5, 6], false).unwrap();
        assert!(a.columns.is_empty());
        assert_eq!(a.cost, 0);
    }
}
