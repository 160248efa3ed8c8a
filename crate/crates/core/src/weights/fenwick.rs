/// Binary indexed tree over `f64` with prefix sums.
pub(crate) struct Fenwick {
    tree: Vec<f64>,
}

impl Fenwick {
    pub(crate) fn new(n: usize) -> Self {
        Fenwick { tree: vec![0.0; n + 1] }
    }

    pub(crate) fn clear(&mut self) {
        self.tree.fill(0.0);
    }

    pub(crate) fn add(&mut self, index: usize, value: f64) {
        let mut i = index + 1;
        while i < self.tree.len() {
            self.tree[i] += value;
            i += i & i.wrapping_neg();
        }
    }

    /// Sum of entries `0..end`.
    pub(crate) fn prefix(&self, end: usize) -> f64 {
        let mut i = end;
        let mut acc = 0.0;
        while i > 0 {
            acc += self.tree[i];
            i -= i & i.wrapping_neg();
        }
        acc
    }
}
