pub mod combinatorics;
pub mod examples_fig;
pub mod order_sweep;
pub mod quad_mh;
pub mod regret;
pub mod simulate;
pub mod symbolic;
