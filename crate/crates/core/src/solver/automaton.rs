//! Stepsize lattice and the matrix-index automaton.

/// Outcome of one iteration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Outcome {
    Success,
    Failure,
}

impl Outcome {
    pub fn is_success(self) -> bool {
        self == Outcome::Success
    }

    pub fn symbol(self) -> char {
        match self {
            Outcome::Success => 'S',
            Outcome::Failure => 'F',
        }
    }

    pub fn from_symbol(c: char) -> Option<Self> {
        match c {
            'S' => Some(Outcome::Success),
            'F' => Some(Outcome::Failure),
            _ => None,
        }
    }
}

/// `δ = δ₀ τ^j` with `j ≥ −j_max`, so `δ ≤ δ_max = δ₀ τ^{−j_max}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepSize {
    delta0: f64,
    tau: f64,
    j_max: i32,
    j: i32,
}

impl StepSize {
    pub fn new(delta0: f64, tau: f64, j_max: u32) -> Self {
        Self {
            delta0,
            tau,
            j_max: j_max as i32,
            j: 0,
        }
    }

    pub fn delta(&self) -> f64 {
        self.delta0 * self.tau.powi(self.j)
    }

    pub fn delta_max(&self) -> f64 {
        self.delta0 * self.tau.powi(-self.j_max)
    }

    pub fn exponent(&self) -> i32 {
        self.j
    }

    /// Expands on success (capped at `δ_max`), contracts by `τ` on failure.
    pub fn update(&mut self, outcome: Outcome) {
        match outcome {
            Outcome::Success => self.j = (self.j - 1).max(-self.j_max),
            Outcome::Failure => self.j += 1,
        }
    }
}

/// The `(ℓ, t)` bookkeeping that decides which stored subspace and PSS an
/// iteration uses.
///
/// `ℓ` drops by one on success and rises by one on failure. When the new
/// `ℓ` reaches the running maximum of earlier `ℓ` values, `t = ℓ`; otherwise
/// `t` is one past every index used so far.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[derive(Default)]
pub struct IndexAutomaton {
    ell: i64,
    t: u64,
    max_ell: i64,
    max_t: u64,
    fresh_branch: bool,
}


impl IndexAutomaton {
    pub fn ell(&self) -> i64 {
        self.ell
    }

    pub fn t(&self) -> u64 {
        self.t
    }

    pub fn max_ell(&self) -> i64 {
        self.max_ell
    }

    pub fn max_t(&self) -> u64 {
        self.max_t
    }

    /// Whether the current `t` came from the "one past the maximum" branch.
    pub fn last_was_fresh(&self) -> bool {
        self.fresh_branch
    }

    pub fn update(&mut self, outcome: Outcome) {
        self.ell += match outcome {
            Outcome::Success => -1,
            Outcome::Failure => 1,
        };
        // maxima are over i <= k, i.e. taken before folding in the new values
        if self.ell >= self.max_ell {
            self.t = self.ell as u64;
            self.fresh_branch = false;
        } else {
            self.t = 1 + self.max_t;
            self.fresh_branch = true;
        }
        self.max_ell = self.max_ell.max(self.ell);
        self.max_t = self.max_t.max(self.t);
    }

    /// Runs the automaton over a sequence and returns the `(ℓ, t)` rows.
    pub fn replay(outcomes: &[Outcome]) -> (Vec<i64>, Vec<u64>) {
        let mut a = Self::default();
        outcomes
            .iter()
            .map(|&o| {
                a.update(o);
                (a.ell, a.t)
            })
            .unzip()
    }
}
