use serde::Serialize;

/// `(alpha, beta)`-approximation regret, accumulated round by round from
/// expected rewards of the played super arms.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegretLedger {
    pub alpha: f64,
    pub beta: f64,
    pub opt: f64,
    per_round: Vec<f64>,
    cumulative: Vec<f64>,
}

impl RegretLedger {
    pub fn new(alpha: f64, beta: f64, opt: f64) -> Self {
        Self {
            alpha,
            beta,
            opt,
            per_round: Vec::new(),
            cumulative: Vec::new(),
        }
    }

    /// `alpha * beta * opt`.
    pub fn baseline(&self) -> f64 {
        self.alpha * self.beta * self.opt
    }

    /// Appends a round with expected reward `r_mu(S_t)`; returns its regret.
    pub fn update(&mut self, expected_reward: f64) -> f64 {
        let regret = self.baseline() - expected_reward;
        let total = self.total() + regret;
        self.per_round.push(regret);
        self.cumulative.push(total);
        regret
    }

    pub fn total(&self) -> f64 {
        self.cumulative.last().copied().unwrap_or(0.0)
    }

    pub fn rounds(&self) -> usize {
        self.per_round.len()
    }

    pub fn per_round(&self) -> &[f64] {
        &self.per_round
    }

    pub fn cumulative(&self) -> &[f64] {
        &self.cumulative
    }
}
