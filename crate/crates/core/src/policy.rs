/// Every tolerance, sample count and seed used by the toolkit.
///
/// One record is threaded explicitly through all operations; there is no
/// global state. Reports echo the record so that a run can be reproduced.
#[derive(Debug, Clone, PartialEq)]
pub struct NumericPolicy {
    /// Relative singular-value cutoff, scaled by `max(rows, cols)`.
    pub rank_tol: f64,
    /// Random starts for multi-start sphere searches.
    pub search_starts: usize,
    /// Iteration cap per search start.
    pub search_max_iters: usize,
    /// A start stops once the relative improvement drops below this.
    pub search_rel_tol: f64,
    /// Slack used when deciding that a sampled point refutes an inequality.
    pub report_tol: f64,
    /// Euclidean distance below which a vector counts as lying in a span.
    pub membership_tol: f64,
    /// Sphere samples per continuation step (canonical directions are added).
    pub samples_per_step: usize,
    /// Hard cap on Neumann series length.
    pub neumann_max_terms: usize,
    /// Subdiagonal deflation threshold for QR iteration.
    pub qr_deflation_tol: f64,
    /// QR iteration cap, per unit of dimension.
    pub qr_iters_per_dim: usize,
    /// Seed for every randomized search.
    pub seed: u64,
}

impl Default for NumericPolicy {
    fn default() -> Self {
        NumericPolicy {
            rank_tol: 1e-10,
            search_starts: 64,
            search_max_iters: 10_000,
            search_rel_tol: 1e-12,
            report_tol: 1e-12,
            membership_tol: 1e-8,
            samples_per_step: 256,
            neumann_max_terms: 1_000_000,
            qr_deflation_tol: 1e-14,
            qr_iters_per_dim: 30,
            seed: 0,
        }
    }
}

impl NumericPolicy {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_starts(mut self, starts: usize) -> Self {
        self.search_starts = starts;
        self
    }

    /// Absolute singular-value threshold for an `rows x cols` matrix whose
    /// largest singular value is `sigma_max`.
    pub fn rank_cutoff(&self, rows: usize, cols: usize, sigma_max: f64) -> f64 {
        self.rank_tol * rows.max(cols).max(1) as f64 * sigma_max
    }
}
