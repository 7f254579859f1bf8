use serde::{Deserialize, Serialize};

use super::{product_input, CorrelationBox, XorTask};
use crate::bitcore::{check_width_cap, BooleanFunction, PriorDistribution};
use crate::error::{Error, Result};
use crate::nlvalue::StrategyPair;

/// Largest number of `(x, y, box outcomes)` terms [`protocol_success_exact`]
/// sums.
pub const PROTOCOL_MAX_TERMS: u64 = 1 << 24;

/// A box whose input bits are AND-products of the party's input bits.
///
/// Wiring entry `j` is a mask over the party's `n`-bit input; box input bit
/// `j` (MSB-first) is the AND of the selected bits. An empty mask feeds `1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WiredBox {
    pub correlation: CorrelationBox,
    pub alice_wiring: Vec<u32>,
    pub bob_wiring: Vec<u32>,
}

/// Shared-box protocol: each party outputs its local bit XOR all its box
/// outputs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ProtocolFile", into = "ProtocolFile")]
pub struct BoxProtocol {
    n: usize,
    alice_local: Vec<bool>,
    bob_local: Vec<bool>,
    boxes: Vec<WiredBox>,
}

#[derive(Serialize, Deserialize)]
struct ProtocolFile {
    n: usize,
    alice_local: Vec<bool>,
    bob_local: Vec<bool>,
    boxes: Vec<WiredBox>,
}

impl TryFrom<ProtocolFile> for BoxProtocol {
    type Error = Error;

    fn try_from(p: ProtocolFile) -> Result<Self> {
        BoxProtocol::new(p.n, p.alice_local, p.bob_local, p.boxes)
    }
}

impl From<BoxProtocol> for ProtocolFile {
    fn from(p: BoxProtocol) -> Self {
        ProtocolFile {
            n: p.n,
            alice_local: p.alice_local,
            bob_local: p.bob_local,
            boxes: p.boxes,
        }
    }
}

impl BoxProtocol {
    pub fn new(
        n: usize,
        alice_local: Vec<bool>,
        bob_local: Vec<bool>,
        boxes: Vec<WiredBox>,
    ) -> Result<Self> {
        check_width_cap(n)?;
        let len = 1usize << n;
        if alice_local.len() != len || bob_local.len() != len {
            return Err(Error::InvalidArgument(format!(
                "local tables must have {len} entries"
            )));
        }
        for (k, w) in boxes.iter().enumerate() {
            if w.alice_wiring.len() != w.correlation.nx()
                || w.bob_wiring.len() != w.correlation.ny()
            {
                return Err(Error::InvalidArgument(format!(
                    "box {k}: wiring lengths do not match box widths"
                )));
            }
            if let Some(m) = w
                .alice_wiring
                .iter()
                .chain(&w.bob_wiring)
                .find(|&&m| m as usize >= len)
            {
                return Err(Error::InvalidArgument(format!(
                    "box {k}: mask {m:#b} exceeds {n} input bits"
                )));
            }
        }
        Ok(BoxProtocol {
            n,
            alice_local,
            bob_local,
            boxes,
        })
    }

    /// Box-free protocol from deterministic tables.
    pub fn local(pair: &StrategyPair) -> Self {
        BoxProtocol {
            n: pair.width(),
            alice_local: pair.alice().to_vec(),
            bob_local: pair.bob().to_vec(),
            boxes: Vec::new(),
        }
    }

    pub fn width(&self) -> usize {
        self.n
    }

    pub fn boxes(&self) -> &[WiredBox] {
        &self.boxes
    }

    pub fn alice_local(&self, x: u32) -> bool {
        self.alice_local[x as usize]
    }

    pub fn bob_local(&self, y: u32) -> bool {
        self.bob_local[y as usize]
    }

    /// Inputs fed to box `k` when the parties hold `x` and `y`.
    pub fn box_inputs(&self, k: usize, x: u32, y: u32) -> (u32, u32) {
        let w = &self.boxes[k];
        (
            product_input(x, &w.alice_wiring),
            product_input(y, &w.bob_wiring),
        )
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("finite floats serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("protocol JSON: {e}")))
    }
}

/// Two-box protocol for AND of two bits split as `z = x ⊕ y`.
///
/// `z₁z₂ = x₁x₂ ⊕ x₁y₂ ⊕ y₁x₂ ⊕ y₁y₂`: the local parts compute `x₁x₂` and
/// `y₁y₂`, box 1 takes `(x₁, y₂)` and box 2 takes `(x₂, y₁)`, each
/// supplying the cross term as `a ⊕ b`. With independent boxes of CHSH
/// success `p` the protocol succeeds with probability `p² + (1 − p)²`.
pub fn and_protocol_from_two_boxes(
    box1: &CorrelationBox,
    box2: &CorrelationBox,
) -> Result<BoxProtocol> {
    for b in [box1, box2] {
        if (b.nx(), b.ny()) != (1, 1) {
            return Err(Error::InvalidArgument(
                "AND protocol needs single-bit boxes".into(),
            ));
        }
    }
    let and = |v: u32| v == 0b11;
    BoxProtocol::new(
        2,
        (0..4).map(and).collect(),
        (0..4).map(and).collect(),
        vec![
            WiredBox {
                correlation: box1.clone(),
                alice_wiring: vec![0b10],
                bob_wiring: vec![0b01],
            },
            WiredBox {
                correlation: box2.clone(),
                alice_wiring: vec![0b01],
                bob_wiring: vec![0b10],
            },
        ],
    )
}

/// Exact success on an XOR task, summing over every input pair and every
/// combination of box outcomes.
pub fn protocol_task_success(protocol: &BoxProtocol, task: &XorTask) -> Result<f64> {
    Error::check_width(task.nx(), protocol.n)?;
    Error::check_width(task.ny(), protocol.n)?;
    let k = protocol.boxes.len();
    let terms = 2 * protocol.n as u32 + 2 * k as u32;
    if terms > PROTOCOL_MAX_TERMS.trailing_zeros() {
        return Err(Error::guard(
            format!(
                "exact protocol evaluation with n={} and {k} boxes",
                protocol.n
            ),
            format!("4^n · 4^boxes ≤ {PROTOCOL_MAX_TERMS}"),
        ));
    }
    let len = 1u32 << protocol.n;
    let mut total = 0.0;
    let mut inputs = vec![(0, 0); k];
    for x in 0..len {
        for y in 0..len {
            let weight = task.weight(x, y);
            if weight == 0.0 {
                continue;
            }
            for (j, slot) in inputs.iter_mut().enumerate() {
                *slot = protocol.box_inputs(j, x, y);
            }
            let base = protocol.alice_local(x) ^ protocol.bob_local(y);
            let target = task.target(x, y);
            let mut win = 0.0;
            // 2 bits per box: (a_j, b_j)
            for outcome in 0..1u64 << (2 * k) {
                let mut p = 1.0;
                let mut parity = base;
                for (j, (bx, by)) in inputs.iter().enumerate() {
                    let a = outcome >> (2 * j + 1) & 1 == 1;
                    let b = outcome >> (2 * j) & 1 == 1;
                    p *= protocol.boxes[j].correlation.prob(*bx, *by, a, b);
                    if p == 0.0 {
                        break;
                    }
                    parity ^= a ^ b;
                }
                if p > 0.0 && parity == target {
                    win += p;
                }
            }
            total += weight * win;
        }
    }
    Ok(total)
}

/// Exact success of a protocol on the nonlocal computation of `f`.
pub fn protocol_success_exact(
    protocol: &BoxProtocol,
    f: &BooleanFunction,
    prior: &PriorDistribution,
) -> Result<f64> {
    Error::check_width(f.width(), protocol.n)?;
    protocol_task_success(protocol, &XorTask::nonlocal(f, prior)?)
}
