use crate::ratemodel::CapacityMatrix;

/// For every node, the nodes it may ever take on as WiFi clients.
///
/// Row `i` holds `n*(i)` clients: the largest `n` such that at least `n`
/// nodes keep their baseline rate through `c_ij / n`, filled with the ones
/// that need the least.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProspectiveClientMatrix {
    rows: Vec<Vec<usize>>,
    budget: Vec<Option<usize>>,
}

impl ProspectiveClientMatrix {
    pub fn node_count(&self) -> usize {
        self.rows.len()
    }

    /// Prospective clients of `i`, ascending node index.
    pub fn row(&self, i: usize) -> &[usize] {
        &self.rows[i]
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.rows[i].binary_search(&j).is_ok()
    }

    /// `n*(i)`, or `None` when no client set of any size works.
    pub fn budget(&self, i: usize) -> Option<usize> {
        self.budget[i]
    }

    pub fn to_matrix(&self) -> Vec<Vec<u8>> {
        let n = self.rows.len();
        let mut w = vec![vec![0u8; n]; n];
        for (i, row) in self.rows.iter().enumerate() {
            for &j in row {
                w[i][j] = 1;
            }
        }
        w
    }
}

/// Nodes `j != i` whose baseline survives `c_ij / n`.
pub fn supportable(c: &CapacityMatrix, baselines: &[f64], i: usize, n: usize) -> Vec<usize> {
    (0..c.len())
        .filter(|&j| j != i && c.get(i, j) / n as f64 >= baselines[j])
        .collect()
}

pub fn prospective_client_matrix(c: &CapacityMatrix, baselines: &[f64]) -> ProspectiveClientMatrix {
    let n = c.len();
    let mut rows = Vec::with_capacity(n);
    let mut budget = Vec::with_capacity(n);
    for i in 0..n {
        // |S(n)| shrinks as n grows, so the feasible sizes form a prefix 1..=n*.
        let feasible = |m: usize| supportable(c, baselines, i, m).len() >= m;
        let (mut lo, mut hi) = (0usize, n.saturating_sub(1));
        while lo < hi {
            let mid = (lo + hi).div_ceil(2);
            if feasible(mid) {
                lo = mid;
            } else {
                hi = mid - 1;
            }
        }
        if lo == 0 {
            rows.push(Vec::new());
            budget.push(None);
            continue;
        }
        let mut members = supportable(c, baselines, i, lo);
        members.sort_by(|&a, &b| baselines[a].total_cmp(&baselines[b]).then(a.cmp(&b)));
        members.truncate(lo);
        members.sort_unstable();
        rows.push(members);
        budget.push(Some(lo));
    }
    ProspectiveClientMatrix { rows, budget }
}
