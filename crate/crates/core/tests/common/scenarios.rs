use kfrac::config::{parse_config, ExperimentConfig};
use kfrac::galerkin_solver::{run, SolutionHistory};
use kfrac::problem_model::ProblemData;
use kfrac::verification::{check_apriori_1, check_apriori_2, check_apriori_3};

pub const NONLINEAR_REFERENCE: &str = include_str!("../../../../scenarios/nonlinear_reference.toml");
pub const LINEAR_ORACLE: &str = include_str!("../../../../scenarios/linear_oracle.toml");

/// A-priori ratios (bound 1, bound 2 weighted, bound 3) of the reference
/// nonlinear scenario at 16384 steps; regenerate with
/// `cargo test --test verification -- --ignored pinned`.
pub const PINNED_NONLINEAR: [f64; 3] = [0.4030459034645263, 1.1345561047310364, 0.02157677153984577];
/// The same for the single-mode linear scenario.
pub const PINNED_LINEAR: [f64; 3] = [1.5343349273671527, 1.534334927367152, 0.2814941480028814];
pub const PINNED_STEPS: usize = 16384;

pub fn config(text: &str) -> ExperimentConfig {
    parse_config(text).unwrap_or_else(|e| panic!("{e}"))
}

pub fn with_steps(text: &str, n: usize) -> ExperimentConfig {
    let mut c = config(text);
    c.solver.n_steps = n;
    c
}

pub fn solve(c: &ExperimentConfig) -> (ProblemData, SolutionHistory) {
    let p = c.build_problem().unwrap();
    let h = run(&p, c.solver_config().unwrap()).unwrap();
    (p, h)
}

pub fn apriori_ratios(h: &SolutionHistory, p: &ProblemData) -> [f64; 3] {
    [
        check_apriori_1(h, p).unwrap().ratio,
        check_apriori_2(h, p).unwrap().weighted.ratio,
        check_apriori_3(h, p).unwrap().ratio,
    ]
}

pub fn relative(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// A one-mode linear problem on (0, 1) with `u0 = φ_1` and no forcing.
pub fn single_mode(alpha: f64, t_final: f64, n_steps: usize) -> ExperimentConfig {
    config(&format!(
        "[problem]\nalpha = {alpha}\ns = 0.5\nmodes = 1\n[solver]\nt_final = {t_final}\nn_steps = {n_steps}\n"
    ))
}
