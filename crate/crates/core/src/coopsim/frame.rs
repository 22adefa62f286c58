use rand::Rng;

use super::config::{LinkId, PerLink, SystemConfig, SystemKind};
use crate::channel::{draw_realization, propagate_into, LinkModel};
use crate::chaos::{random_sequence, ChaoticSequence};
use crate::detection::{branch_metrics, correlate_srdcsk, decide_relay_symbol, Decision};
use crate::error::{Error, Result};
use crate::walsh::{index_bit_errors, walsh_matrix, WalshMatrix};
use crate::waveform::{encode_relay, encode_source, FrameParams, MessageSymbols};

/// Per-stream result of one transmission period.
///
/// For the baselines the index class holds the relay's own bit sent in slot 3.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FrameOutcome {
    pub relay_decode_ok: bool,
    pub index_ok: bool,
    pub index_bit_errors: u32,
    pub modulated_bit_error: bool,
}

impl FrameOutcome {
    /// Case label 1..=4: relay/index correct, relay wrong, index wrong, both wrong.
    pub fn case(&self) -> usize {
        match (self.relay_decode_ok, self.index_ok) {
            (true, true) => 1,
            (false, true) => 2,
            (true, false) => 3,
            (false, false) => 4,
        }
    }
}

/// Test hook for the relay's decode-and-forward decision.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RelayFault {
    #[default]
    None,
    /// Forward the opposite of the relay's decision.
    FlipDecision,
}

/// Simulates transmission periods of one configured system, reusing buffers.
#[derive(Debug, Clone)]
pub struct FrameSimulator {
    system: SystemKind,
    slot: FrameParams,
    walsh: Option<WalshMatrix>,
    links: PerLink<LinkModel>,
    renormalize: bool,
    rx: Vec<f64>,
}

impl FrameSimulator {
    pub fn new(cfg: &SystemConfig) -> Result<Self> {
        cfg.validate()?;
        let slot = cfg.slot_frame()?;
        let walsh = match cfg.system {
            SystemKind::CimSrDcskCc => Some(walsh_matrix(slot.n())?),
            _ => None,
        };
        Ok(Self {
            system: cfg.system,
            slot,
            walsh,
            links: PerLink {
                sr: cfg.link(LinkId::SourceRelay),
                rd: cfg.link(LinkId::RelayDestination),
                sd: cfg.link(LinkId::SourceDestination),
            },
            renormalize: cfg.renormalize_chaos,
            rx: Vec::with_capacity(slot.sf()),
        })
    }

    pub fn system(&self) -> SystemKind {
        self.system
    }

    /// Order of the index alphabet: `N` for the proposed system, 2 for the relay bit of a baseline.
    pub fn index_order(&self) -> usize {
        match self.system {
            SystemKind::CimSrDcskCc => self.slot.n(),
            _ => 2,
        }
    }

    pub fn random_message<R: Rng + ?Sized>(&self, rng: &mut R) -> MessageSymbols {
        let b = if rng.random::<bool>() { 1 } else { -1 };
        let a = rng.random_range(1..=self.index_order());
        MessageSymbols::new(b, a, self.index_order()).expect("drawn symbols are in range")
    }

    pub fn simulate<R: Rng + ?Sized>(
        &mut self,
        msg: MessageSymbols,
        rng: &mut R,
    ) -> Result<FrameOutcome> {
        self.simulate_with_fault(msg, rng, RelayFault::None)
    }

    pub fn simulate_with_fault<R: Rng + ?Sized>(
        &mut self,
        msg: MessageSymbols,
        rng: &mut R,
        fault: RelayFault,
    ) -> Result<FrameOutcome> {
        if msg.a() > self.index_order() {
            return Err(Error::IndexOutOfRange { index: msg.a(), order: self.index_order() });
        }
        match self.system {
            SystemKind::CimSrDcskCc => self.cim_period(msg, rng, fault),
            _ => self.baseline_period(msg, rng, fault),
        }
    }

    fn reference<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<ChaoticSequence> {
        let x = random_sequence(rng, self.slot.u())?;
        Ok(if self.renormalize { x.renormalized() } else { x })
    }

    /// Slot 1: broadcast from S. Returns the relay's forwarded symbol and `Z_sd`.
    fn broadcast<R: Rng + ?Sized>(
        &mut self,
        b: i8,
        rng: &mut R,
        fault: RelayFault,
    ) -> Result<(i8, f64)> {
        let x = self.reference(rng)?;
        let frame = encode_source(b, &x, &self.slot)?;

        let real = draw_realization(&self.links.sr, rng);
        propagate_into(frame.samples(), &self.links.sr, &real, rng, &mut self.rx)?;
        let mut b_relay = decide_relay_symbol(correlate_srdcsk(&self.rx, &self.slot)?);
        if fault == RelayFault::FlipDecision {
            b_relay = -b_relay;
        }

        let real = draw_realization(&self.links.sd, rng);
        propagate_into(frame.samples(), &self.links.sd, &real, rng, &mut self.rx)?;
        let z_sd = correlate_srdcsk(&self.rx, &self.slot)?;
        Ok((b_relay, z_sd))
    }

    fn cim_period<R: Rng + ?Sized>(
        &mut self,
        msg: MessageSymbols,
        rng: &mut R,
        fault: RelayFault,
    ) -> Result<FrameOutcome> {
        let (b_relay, z_sd) = self.broadcast(msg.b(), rng, fault)?;

        // Slot 2: fresh reference at R, carrying the forwarded bit and the index symbol.
        let walsh = self.walsh.as_ref().expect("proposed system has a walsh code");
        let x = self.reference(rng)?;
        let forwarded = MessageSymbols::new(b_relay, msg.a(), walsh.order())?;
        let frame = encode_relay(forwarded, &x, walsh, &self.slot)?;
        let real = draw_realization(&self.links.rd, rng);
        propagate_into(frame.samples(), &self.links.rd, &real, rng, &mut self.rx)?;
        let bm = branch_metrics(&self.rx, walsh, &self.slot)?;
        let decision = Decision::combine(z_sd, &bm);

        let index_bit_errors = index_bit_errors(msg.a(), decision.a_hat);
        Ok(FrameOutcome {
            relay_decode_ok: b_relay == msg.b(),
            index_ok: decision.a_hat == msg.a(),
            index_bit_errors,
            modulated_bit_error: decision.b_hat != msg.b(),
        })
    }

    fn relay_hop<R: Rng + ?Sized>(&mut self, symbol: i8, rng: &mut R) -> Result<f64> {
        let x = self.reference(rng)?;
        let frame = encode_source(symbol, &x, &self.slot)?;
        let real = draw_realization(&self.links.rd, rng);
        propagate_into(frame.samples(), &self.links.rd, &real, rng, &mut self.rx)?;
        correlate_srdcsk(&self.rx, &self.slot)
    }

    fn baseline_period<R: Rng + ?Sized>(
        &mut self,
        msg: MessageSymbols,
        rng: &mut R,
        fault: RelayFault,
    ) -> Result<FrameOutcome> {
        let (b_relay, z_sd) = self.broadcast(msg.b(), rng, fault)?;
        // Slot 2: plain forwarding.
        let z_rd = self.relay_hop(b_relay, rng)?;
        let b_hat = crate::detection::egc_decide(z_sd, z_rd);
        // Slot 3: the relay's own bit; index symbol 1 carries bit 0 as +1.
        let own = if msg.a() == 1 { 1 } else { -1 };
        let own_hat = decide_relay_symbol(self.relay_hop(own, rng)?);
        let relay_bit_error = own_hat != own;
        Ok(FrameOutcome {
            relay_decode_ok: b_relay == msg.b(),
            index_ok: !relay_bit_error,
            index_bit_errors: u32::from(relay_bit_error),
            modulated_bit_error: b_hat != msg.b(),
        })
    }
}

/// One transmission period of the proposed system.
pub fn simulate_frame<R: Rng + ?Sized>(
    cfg: &SystemConfig,
    msg: MessageSymbols,
    rng: &mut R,
) -> Result<FrameOutcome> {
    if cfg.system != SystemKind::CimSrDcskCc {
        return Err(Error::InvalidConfig(format!("simulate_frame needs cim-sr-dcsk-cc, got {}", cfg.system)));
    }
    FrameSimulator::new(cfg)?.simulate(msg, rng)
}

/// One three-slot period of a baseline; `msg.a()` in {1, 2} is the relay's own bit plus one.
pub fn simulate_frame_baseline<R: Rng + ?Sized>(
    cfg: &SystemConfig,
    msg: MessageSymbols,
    rng: &mut R,
) -> Result<FrameOutcome> {
    if !cfg.system.is_baseline() {
        return Err(Error::InvalidConfig(format!("{} is not a baseline system", cfg.system)));
    }
    FrameSimulator::new(cfg)?.simulate(msg, rng)
}
