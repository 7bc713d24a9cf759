/// Global numbering of free degrees of freedom.
///
/// Global order is interleaved per node: (value, slope) of node 0, bubbles of
/// element 0, (value, slope) of node 1, bubbles of element 1, and so on. The
/// value and slope at x = 0 and x = 1 are clamped and receive no index. An
/// element's DOFs therefore form one contiguous block of `p + 1` entries,
/// which bounds the bandwidth by `p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DofMap {
    p: usize,
    element_dofs: Vec<Vec<Option<usize>>>,
    n_free: usize,
}

impl DofMap {
    pub fn new(n_elements: usize, p: usize) -> Self {
        let bubbles = p - 3;
        let n_nodes = n_elements + 1;
        // Running global index over the unconstrained layout.
        let node_slot = |j: usize| j * (2 + bubbles);
        let clamped = |g: usize| g < 2 || g >= node_slot(n_nodes - 1);
        let mut free_index = Vec::new();
        let mut next = 0;
        let total = node_slot(n_nodes - 1) + 2;
        for g in 0..total {
            if clamped(g) {
                free_index.push(None);
            } else {
                free_index.push(Some(next));
                next += 1;
            }
        }
        let element_dofs = (0..n_elements)
            .map(|e| {
                let start = node_slot(e);
                (start..start + p + 1).map(|g| free_index[g]).collect()
            })
            .collect();
        DofMap {
            p,
            element_dofs,
            n_free: next,
        }
    }

    pub fn n_free(&self) -> usize {
        self.n_free
    }

    pub fn n_elements(&self) -> usize {
        self.element_dofs.len()
    }

    pub fn degree(&self) -> usize {
        self.p
    }

    /// Free indices of element `e` in local shape order.
    pub fn element(&self, e: usize) -> &[Option<usize>] {
        &self.element_dofs[e]
    }

    pub fn bandwidth(&self) -> usize {
        self.element_dofs
            .iter()
            .filter_map(|dofs| {
                let free: Vec<usize> = dofs.iter().flatten().copied().collect();
                Some(free.iter().max()? - free.iter().min()?)
            })
            .max()
            .unwrap_or(0)
    }

    /// Free index of the nodal value at node `j`, if not clamped.
    pub fn node_value(&self, j: usize) -> Option<usize> {
        if j < self.n_elements() {
            self.element_dofs[j][0]
        } else {
            self.element_dofs[j - 1][self.p - 1]
        }
    }

    /// Free index of the nodal slope at node `j`, if not clamped.
    pub fn node_slope(&self, j: usize) -> Option<usize> {
        if j < self.n_elements() {
            self.element_dofs[j][1]
        } else {
            self.element_dofs[j - 1][self.p]
        }
    }

    /// Local coefficient vector of element `e` from a global free vector.
    pub fn gather(&self, e: usize, u: &[f64]) -> Vec<f64> {
        self.element_dofs[e]
            .iter()
            .map(|d| d.map_or(0.0, |i| u[i]))
            .collect()
    }

    /// Free indices of all nodal values, in node order.
    pub fn value_indices(&self) -> Vec<usize> {
        (0..=self.n_elements()).filter_map(|j| self.node_value(j)).collect()
    }
}
