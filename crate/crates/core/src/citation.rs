//! Result tags printed next to verdicts and unmet hypotheses, so that a
//! reader can tell proven statements from conjectural ones.

pub const TRIVIAL_PAIR: &str = "Def of E(C,C')";
pub const BRIDGE_BOUND: &str = "Lemma 2.2";
pub const SAME_TERMINAL_CHAIN: &str = "Prop 2.7";
pub const PAIRING_CLOSED_FORM: &str = "Prop 3.2";
pub const NODE_OF_TERMINAL_CHAIN: &str = "Prop 3.4";
pub const ELEMENTARY_PAIR_ORDER: &str = "Prop 4.3";
pub const SELF_PAIRING_ORDER: &str = "Prop 4.5";
pub const NOT_DIVISIBLE: &str = "Cor 4.6";
pub const BREAKING: &str = "Construction 5.1";
pub const SPLITTING: &str = "Prop 5.3";
pub const ORDER_VIA_STRUCTURE: &str = "Thm 5.4";
pub const LAMBDA: &str = "Def of lambda";
pub const IN_PSI: &str = "Thm 6.5";
pub const THETA_CANDIDATE: &str = "6.8";
pub const THETA_ORTHOGONALITY: &str = "Lemma 6.9";
pub const CONJ_NOT_BREAKABLE: &str = "Conj 7.1";
pub const CONJ_MULTIPLY_CONNECTED: &str = "Conj 7.2";
pub const NOT_BREAKABLE: &str = "Thm 7.3";
pub const MULTIPLY_CONNECTED: &str = "Thm 7.4";
pub const TWO_NODE_FAMILY: &str = "Lemma 7.7";
pub const RESIDUE_CHARACTERISTIC: &str = "caveat to Conj 7.1";
