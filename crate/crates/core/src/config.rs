/// Resource limits shared by the exact solvers.
///
/// The limits exist so that worst-case searches surface as explicit errors
/// instead of unbounded work; they are never part of the mathematics.
#[derive(Debug, Clone)]
pub struct EngineConfig {
    /// Maximum number of pieces a materialized iterate may have.
    pub piece_cap: usize,
    /// Maximum number of DFS states visited by one periodic-orbit search.
    pub branch_cap: usize,
    /// Maximum number of states visited by one graph-loop search.
    pub loop_cap: usize,
    /// Largest period accepted by `patterns::enumerate`.
    pub enumerate_cap: usize,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            piece_cap: 1_000_000,
            branch_cap: 10_000_000,
            loop_cap: 10_000_000,
            enumerate_cap: 10,
        }
    }
}

/// Configuration for the property grid evaluated by `properties::check_all`.
#[derive(Debug, Clone)]
pub struct CheckConfig {
    /// Iterate exponents `k` for the `L`/`S`/`L2` families.
    pub ks: Vec<u32>,
    /// Largest finite period in the grid (`P(n)`, `L(k,n)`, `S(k,q)`).
    pub max_period: u32,
    /// Largest finite parameter for two-parameter properties.
    pub max_mn: u32,
    /// Longest finite prefix searched for `L2(k,m,inf)`.
    pub max_chain_prefix: u32,
    pub engine: EngineConfig,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig {
            ks: vec![1, 2, 4],
            max_period: 9,
            max_mn: 4,
            max_chain_prefix: 6,
            engine: EngineConfig::default(),
        }
    }
}
