//! Instances shared by the solver benchmarks in `benches/`.

use bsscl::bs_words::{parse_chain, Chain, GroupParams};

pub struct Instance {
    pub name: &'static str,
    pub chain: &'static str,
    pub m: i64,
    pub l: i64,
}

impl Instance {
    pub fn load(&self) -> (Chain, GroupParams) {
        let p = GroupParams::new(self.m, self.l).expect("valid group");
        (parse_chain(self.chain, &p).expect("valid chain"), p)
    }
}

pub const BLOCK: &[Instance] = &[
    Instance { name: "atAT_2_3", chain: "atAT", m: 2, l: 3 },
    Instance { name: "atAT_3_5", chain: "atAT", m: 3, l: 5 },
    Instance { name: "eg1_k3_6_9", chain: "a^3t^2 + 2T", m: 6, l: 9 },
    Instance { name: "eg2_4_6", chain: "at^2At^-1 + T", m: 4, l: 6 },
    Instance { name: "eg2_2_3", chain: "at^2At^-1 + T", m: 2, l: 3 },
];

/// Piece-LP instances with their turn bounds.
pub const PIECES: &[(Instance, u32)] = &[
    (Instance { name: "atAT_3_4", chain: "atAT", m: 3, l: 4 }, 4),
    (Instance { name: "ataTAtAT_2_3", chain: "ataTAtAT", m: 2, l: 3 }, 4),
    (Instance { name: "eg3", chain: "at^2At^-2", m: 2, l: 3 }, 4),
];
