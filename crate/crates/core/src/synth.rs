//! Synthetic sessions: users with per-object behavioral profiles, rendered
//! into sensor streams and contact events in the ingestion formats.
//!
//! Each interaction is an opening swing, a hold and a closing swing. GYRO
//! carries two raised-cosine pulses along a user-specific axis, ACC their
//! tangential component plus a closing impact, MAG a drift proportional to
//! the door angle and MIC_SPL a decaying burst at each contact. Co-located
//! devices pick up an attenuated copy of the motion and sound.
//!
//! Mimicry attackers draw from `alpha * victim + (1 - alpha) * attacker`
//! with extra jitter.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingestion::{
    write_dir, AttackKind, CoLocationMap, ContactEvent, ContactKind, Dataset, RunMetadata, SensorKind,
    SensorRecording,
};
use crate::{labels, seed};

pub const CONFIG_FILE: &str = "synth-config.json";
pub const IMU_RATE: f64 = 100.0;
pub const SPL_RATE: f64 = 20.0;
/// Devices record from this long before an interaction to this long after.
pub const RECORD_MARGIN: f64 = 1.5;
pub const MIN_GAP: f64 = 3.5;
pub const MIN_DURATION: f64 = 2.2;
/// Objects within this many positions of each other are co-located.
pub const COLOCATION_RADIUS: usize = 2;

const GRAVITY: f64 = 9.81;
const SPL_BASELINE: f64 = 35.0;
const SPL_DROP_PER_RANK: f64 = 6.0;
const MAG_GAIN: f64 = 25.0;
const NOISE_GYRO: f64 = 0.02;
const NOISE_ACC: f64 = 0.05;
const NOISE_MAG: f64 = 0.3;
const NOISE_SPL: f64 = 1.0;

/// How one user handles one object. Magnitudes in SI units, angles in
/// radians, SPL in dB above baseline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectProfile {
    pub duration_mean: f64,
    pub duration_std: f64,
    pub open_width: f64,
    pub close_width: f64,
    /// Peak angular velocity of the opening swing (rad/s).
    pub gyro: f64,
    pub axis_tilt: f64,
    pub axis_azimuth: f64,
    /// Tangential acceleration amplitude (m/s²).
    pub accel: f64,
    pub spl_peak: f64,
    pub spl_decay: f64,
    /// Pause before the interaction (s).
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UserProfile {
    pub user_id: String,
    /// Shifts every swing axis; in `[-1, 1]`.
    pub handedness: f64,
    pub objects: Vec<ObjectProfile>,
}

/// `(center, half_range)` of each profile parameter across the population.
const POPULATION: [(f64, f64); 10] = [
    (3.5, 1.2),  // duration_mean
    (0.7, 0.25), // open_width
    (0.6, 0.25), // close_width
    (1.6, 0.8),  // gyro
    (0.35, 0.3), // axis_tilt
    (0.0, 1.2),  // axis_azimuth
    (1.5, 0.8),  // accel
    (15.0, 7.0), // spl_peak
    (0.45, 0.25),// spl_decay
    (4.5, 1.0),  // gap
];
const DURATION_CV: f64 = 0.06;

impl ObjectProfile {
    fn from_params(v: [f64; 10]) -> Self {
        ObjectProfile {
            duration_mean: v[0].max(MIN_DURATION + 0.1),
            duration_std: DURATION_CV * v[0].max(MIN_DURATION + 0.1),
            open_width: v[1].max(0.15),
            close_width: v[2].max(0.15),
            gyro: v[3].max(0.1),
            axis_tilt: v[4],
            axis_azimuth: v[5],
            accel: v[6].max(0.05),
            spl_peak: v[7].max(1.0),
            spl_decay: v[8].max(0.05),
            gap: v[9].max(MIN_GAP),
        }
    }

    /// Draws a profile; `spread` scales every deviation from the population
    /// center.
    pub fn random(rng: &mut ChaCha8Rng, spread: f64) -> Self {
        let mut v = [0.0; 10];
        for (x, (c, h)) in v.iter_mut().zip(POPULATION) {
            *x = c + spread * h * rng.gen_range(-1.0..=1.0);
        }
        Self::from_params(v)
    }

    /// Every parameter at the top (`high`) or bottom of its population range.
    pub fn extreme(high: bool) -> Self {
        let sign = if high { 1.0 } else { -1.0 };
        let mut v = [0.0; 10];
        for (x, (c, h)) in v.iter_mut().zip(POPULATION) {
            *x = c + sign * h;
        }
        Self::from_params(v)
    }

    /// `alpha * self + (1 - alpha) * other`, field by field.
    pub fn mix(&self, other: &ObjectProfile, alpha: f64) -> ObjectProfile {
        let m = |a: f64, b: f64| alpha * a + (1.0 - alpha) * b;
        ObjectProfile {
            duration_mean: m(self.duration_mean, other.duration_mean),
            duration_std: m(self.duration_std, other.duration_std),
            open_width: m(self.open_width, other.open_width),
            close_width: m(self.close_width, other.close_width),
            gyro: m(self.gyro, other.gyro),
            axis_tilt: m(self.axis_tilt, other.axis_tilt),
            axis_azimuth: m(self.axis_azimuth, other.axis_azimuth),
            accel: m(self.accel, other.accel),
            spl_peak: m(self.spl_peak, other.spl_peak),
            spl_decay: m(self.spl_decay, other.spl_decay),
            gap: m(self.gap, other.gap),
        }
    }
}

impl UserProfile {
    pub fn random(user_id: &str, objects: usize, spread: f64, rng: &mut ChaCha8Rng) -> Self {
        UserProfile {
            user_id: user_id.to_string(),
            handedness: (spread * rng.gen_range(-1.0..=1.0f64)).clamp(-1.0, 1.0),
            objects: (0..objects).map(|_| ObjectProfile::random(rng, spread)).collect(),
        }
    }

    /// Mimicry profile: `alpha * victim + (1 - alpha) * attacker`.
    pub fn imitate(attacker: &UserProfile, victim: &UserProfile, alpha: f64) -> UserProfile {
        UserProfile {
            user_id: attacker.user_id.clone(),
            handedness: alpha * victim.handedness + (1.0 - alpha) * attacker.handedness,
            objects: victim
                .objects
                .iter()
                .zip(&attacker.objects)
                .map(|(v, a)| v.mix(a, alpha))
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttackSpec {
    pub attacker_id: String,
    pub victim_id: String,
    /// Imitation fidelity in `[0, 1]`.
    pub alpha: f64,
    pub kind: AttackKind,
    /// Relative jitter added on top of the attacker's own variability.
    pub jitter: f64,
}

impl AttackSpec {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::validation(format!("fidelity {} outside [0, 1]", self.alpha)));
        }
        if !matches!(self.kind, AttackKind::Video | AttackKind::InPerson) {
            return Err(Error::validation("mimicry attacks are video or in_person"));
        }
        if !(self.jitter >= 0.0) {
            return Err(Error::validation("attack jitter must be non-negative"));
        }
        Ok(())
    }
}

/// Parameters of a single interaction, after per-interaction variability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InteractionParams {
    pub duration: f64,
    pub open_width: f64,
    pub close_width: f64,
    pub gyro: f64,
    pub axis_tilt: f64,
    pub axis_azimuth: f64,
    pub accel: f64,
    pub spl_peak: f64,
    pub spl_decay: f64,
    pub gap: f64,
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample::<f64, _>(StandardNormal)
}

/// Draws one interaction: relative jitter `intra + extra` on magnitudes,
/// absolute jitter on angles.
pub fn sample_interaction(
    p: &ObjectProfile,
    handedness: f64,
    intra: f64,
    extra: f64,
    rng: &mut ChaCha8Rng,
) -> InteractionParams {
    let duration = {
        let d = p.duration_mean + p.duration_std * normal(rng);
        (d * (1.0 + extra * normal(rng))).max(MIN_DURATION)
    };
    let mut scale = |x: f64, lo: f64| {
        let a = x * (1.0 + intra * normal(rng));
        (a * (1.0 + extra * normal(rng))).max(lo)
    };
    let open_width = scale(p.open_width, 0.1);
    let close_width = scale(p.close_width, 0.1);
    let gyro = scale(p.gyro, 0.05);
    let accel = scale(p.accel, 0.02);
    let spl_peak = scale(p.spl_peak, 0.5);
    let spl_decay = scale(p.spl_decay, 0.03);
    let gap = scale(p.gap, MIN_GAP);
    let angle_sd = 0.5 * intra + extra;
    InteractionParams {
        duration,
        open_width,
        close_width,
        gyro,
        axis_tilt: p.axis_tilt + angle_sd * normal(rng),
        axis_azimuth: p.axis_azimuth + 0.4 * handedness + angle_sd * normal(rng),
        accel,
        spl_peak,
        spl_decay,
        gap,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub seed: u64,
    pub users: usize,
    pub objects: usize,
    pub runs: usize,
    /// Target of every mimicry attack; `None` generates no attacks.
    pub victim: Option<String>,
    /// Attack runs per attacker.
    pub attack_runs: usize,
    pub alpha_video: f64,
    pub alpha_in_person: f64,
    /// Video attack jitter; in-person attacks use twice this.
    pub attack_jitter: f64,
    /// Per-interaction relative variability of every user.
    pub intra_jitter: f64,
    /// Scales inter-user parameter differences.
    pub spread: f64,
    pub imu_rate: f64,
    pub spl_rate: f64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            seed: 0,
            users: 13,
            objects: 8,
            runs: 20,
            victim: Some("U1".into()),
            attack_runs: 5,
            alpha_video: 0.7,
            alpha_in_person: 0.6,
            attack_jitter: 0.05,
            intra_jitter: 0.06,
            spread: 1.0,
            imu_rate: IMU_RATE,
            spl_rate: SPL_RATE,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        if self.users < 2 {
            return Err(Error::validation("synthesis needs at least two users"));
        }
        if self.objects == 0 || self.runs == 0 {
            return Err(Error::validation("synthesis needs at least one object and one run"));
        }
        if !(self.imu_rate > 0.0 && self.spl_rate > 0.0) {
            return Err(Error::validation("sampling rates must be positive"));
        }
        if !(self.intra_jitter >= 0.0 && self.spread >= 0.0) {
            return Err(Error::validation("jitter and spread must be non-negative"));
        }
        if let Some(v) = &self.victim {
            if !user_ids(self.users).contains(v) {
                return Err(Error::validation(format!("unknown victim {v}")));
            }
        }
        for a in [self.alpha_video, self.alpha_in_person] {
            if !(0.0..=1.0).contains(&a) {
                return Err(Error::validation(format!("fidelity {a} outside [0, 1]")));
            }
        }
        Ok(())
    }
}

pub fn user_ids(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("U{i}")).collect()
}

pub fn object_ids(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("O{i}")).collect()
}

/// Objects stand in a row; neighbors within [`COLOCATION_RADIUS`] hear and
/// feel each other.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Layout {
    pub objects: Vec<String>,
    /// `leak[i][j]`: fraction of object `i`'s motion felt by device `j`.
    pub leak: Vec<Vec<f64>>,
    /// Resting magnetic field per device (µT).
    pub field: Vec<[f64; 3]>,
}

impl Layout {
    pub fn new(objects: usize, seed: u64) -> Self {
        let mut rng = seed::rng(seed, labels!["layout"]);
        let mut leak = vec![vec![0.0; objects]; objects];
        for i in 0..objects {
            for j in i + 1..objects {
                let d = j - i;
                if d <= COLOCATION_RADIUS {
                    let f = 0.3 / d as f64 * rng.gen_range(0.8..1.2);
                    leak[i][j] = f;
                    leak[j][i] = f;
                }
            }
        }
        let field = (0..objects)
            .map(|_| [rng.gen_range(-30.0..30.0), rng.gen_range(-30.0..30.0), rng.gen_range(20.0..50.0)])
            .collect();
        Layout {
            objects: object_ids(objects),
            leak,
            field,
        }
    }

    pub fn colocation(&self) -> CoLocationMap {
        let n = self.objects.len();
        (0..n)
            .map(|i| {
                let near: BTreeSet<String> = (0..n)
                    .filter(|&j| j != i && i.abs_diff(j) <= COLOCATION_RADIUS)
                    .map(|j| self.objects[j].clone())
                    .collect();
                (self.objects[i].clone(), near)
            })
            .filter(|(_, s)| !s.is_empty())
            .collect()
    }
}

/// Everything needed to regenerate a session.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub config: SynthConfig,
    pub layout: Layout,
    pub profiles: Vec<UserProfile>,
    pub attacks: Vec<AttackSpec>,
}

#[derive(Debug, Clone)]
pub struct Session {
    pub dataset: Dataset,
    pub provenance: Provenance,
}

fn raised_cosine(t: f64, start: f64, width: f64) -> f64 {
    let x = (t - start) / width;
    if (0.0..=1.0).contains(&x) {
        0.5 * (1.0 - (2.0 * std::f64::consts::PI * x).cos())
    } else {
        0.0
    }
}

/// Integral of [`raised_cosine`] normalized to reach 1 at the pulse end.
fn swing_progress(t: f64, start: f64, width: f64) -> f64 {
    let x = ((t - start) / width).clamp(0.0, 1.0);
    x - (2.0 * std::f64::consts::PI * x).sin() / (2.0 * std::f64::consts::PI)
}

fn tangential(t: f64, start: f64, width: f64) -> f64 {
    let x = (t - start) / width;
    if (0.0..=1.0).contains(&x) {
        (2.0 * std::f64::consts::PI * x).sin()
    } else {
        0.0
    }
}

struct Recorder {
    streams: BTreeMap<(usize, SensorKind), SensorRecording>,
    imu_rate: f64,
    spl_rate: f64,
}

impl Recorder {
    fn stream(&mut self, layout: &Layout, device: usize, kind: SensorKind) -> &mut SensorRecording {
        self.streams
            .entry((device, kind))
            .or_insert_with(|| SensorRecording::new(layout.objects[device].clone(), kind))
    }

    /// Renders one interaction on `object` at `[t0, t0 + duration]` into the
    /// object's device and its co-located devices.
    fn render(&mut self, layout: &Layout, object: usize, t0: f64, p: &InteractionParams, rng: &mut ChaCha8Rng) {
        let t1 = t0 + p.duration;
        let (lo, hi) = (t0 - RECORD_MARGIN, t1 + RECORD_MARGIN);
        let axis = [
            p.axis_tilt.sin() * p.axis_azimuth.cos(),
            p.axis_tilt.sin() * p.axis_azimuth.sin(),
            p.axis_tilt.cos(),
        ];
        let tangent = [-p.axis_azimuth.sin(), p.axis_azimuth.cos(), 0.0];
        let theta_max = p.gyro * p.open_width / 2.0;
        let close_peak = 2.0 * theta_max / p.close_width;
        let close_start = t1 - p.close_width;

        let n = layout.objects.len();
        for device in 0..n {
            let (leak, rank) = if device == object {
                (1.0, 0usize)
            } else if layout.leak[object][device] > 0.0 {
                (layout.leak[object][device], object.abs_diff(device))
            } else {
                continue;
            };
            let field = layout.field[device];
            let imu_ticks = (lo * self.imu_rate).ceil() as i64..=(hi * self.imu_rate).floor() as i64;
            for k in imu_ticks {
                let t = k as f64 / self.imu_rate;
                let omega = p.gyro * raised_cosine(t, t0, p.open_width) - close_peak * raised_cosine(t, close_start, p.close_width);
                let swing = p.accel * (tangential(t, t0, p.open_width) - tangential(t, close_start, p.close_width));
                let impact = 1.5 * p.accel * raised_cosine(t, t1 - 0.05, 0.1);
                let theta = theta_max * (swing_progress(t, t0, p.open_width) - swing_progress(t, close_start, p.close_width));
                let mut gyro = [0.0; 3];
                let mut acc = [0.0; 3];
                let mut mag = [0.0; 3];
                for c in 0..3 {
                    gyro[c] = leak * omega * axis[c] + NOISE_GYRO * normal(rng);
                    acc[c] = leak * (swing * tangent[c] + if c == 2 { impact } else { 0.0 })
                        + if c == 2 { GRAVITY } else { 0.0 }
                        + NOISE_ACC * normal(rng);
                    let drift = if device == object { MAG_GAIN * theta * tangent[c] } else { 0.0 };
                    mag[c] = field[c] + drift + NOISE_MAG * normal(rng);
                }
                self.stream(layout, device, SensorKind::Acc).push(t, &acc);
                self.stream(layout, device, SensorKind::Gyro).push(t, &gyro);
                self.stream(layout, device, SensorKind::Mag).push(t, &mag);
            }
            let peak = (p.spl_peak - SPL_DROP_PER_RANK * rank as f64).max(0.0);
            let spl_ticks = (lo * self.spl_rate).ceil() as i64..=(hi * self.spl_rate).floor() as i64;
            for k in spl_ticks {
                let t = k as f64 / self.spl_rate;
                let burst = |te: f64, gain: f64| {
                    if t >= te {
                        gain * peak * (-(t - te) / p.spl_decay).exp()
                    } else {
                        0.0
                    }
                };
                let v = SPL_BASELINE + burst(t0, 1.0) + burst(t1, 1.3) + NOISE_SPL * normal(rng);
                self.stream(layout, device, SensorKind::MicSpl).push(t, &[v]);
            }
        }
    }
}

/// Appends runs one after another on a shared clock.
struct Timeline<'a> {
    layout: &'a Layout,
    recorder: Recorder,
    contacts: Vec<ContactEvent>,
    runs: Vec<RunMetadata>,
    clock: f64,
    seed: u64,
}

impl Timeline<'_> {
    /// One run: the user visits every object once, in shuffled order.
    fn run(&mut self, meta: RunMetadata, profile: &UserProfile, intra: f64, extra: f64) {
        let mut rng = seed::rng(self.seed, labels!["run", &meta.run_id]);
        let mut order: Vec<usize> = (0..self.layout.objects.len()).collect();
        order.shuffle(&mut rng);
        let start = self.clock;
        let mut cursor = start;
        for o in order {
            let p = sample_interaction(&profile.objects[o], profile.handedness, intra, extra, &mut rng);
            let t0 = cursor + p.gap;
            let t1 = t0 + p.duration;
            self.recorder.render(self.layout, o, t0, &p, &mut rng);
            let device = self.layout.objects[o].clone();
            self.contacts.push(ContactEvent {
                device_id: device.clone(),
                kind: ContactKind::Open,
                t: t0,
            });
            self.contacts.push(ContactEvent {
                device_id: device,
                kind: ContactKind::Close,
                t: t1,
            });
            cursor = t1;
        }
        let end = cursor + RECORD_MARGIN + 0.5;
        self.runs.push(RunMetadata {
            start: Some(start),
            end: Some(end),
            ..meta
        });
        self.clock = end + 1.0;
    }
}

pub fn run_id(user: &str, run: usize) -> String {
    format!("{user}-R{:02}", run + 1)
}

/// Default attack plan: every non-victim user attacks, alternating video
/// and in-person in user order.
pub fn default_attacks(config: &SynthConfig) -> Vec<AttackSpec> {
    let Some(victim) = &config.victim else {
        return Vec::new();
    };
    user_ids(config.users)
        .into_iter()
        .filter(|u| u != victim)
        .enumerate()
        .map(|(i, attacker_id)| {
            let video = i % 2 == 0;
            AttackSpec {
                attacker_id,
                victim_id: victim.clone(),
                alpha: if video { config.alpha_video } else { config.alpha_in_person },
                kind: if video { AttackKind::Video } else { AttackKind::InPerson },
                jitter: if video { config.attack_jitter } else { 2.0 * config.attack_jitter },
            }
        })
        .collect()
}

pub fn profiles(config: &SynthConfig) -> Vec<UserProfile> {
    user_ids(config.users)
        .iter()
        .map(|u| UserProfile::random(u, config.objects, config.spread, &mut seed::rng(config.seed, labels!["profile", u])))
        .collect()
}

/// Generates the session described by `config`, with the default attack
/// plan.
pub fn generate(config: &SynthConfig) -> Result<Session> {
    generate_with(config, profiles(config), default_attacks(config))
}

pub fn generate_with(config: &SynthConfig, profiles: Vec<UserProfile>, attacks: Vec<AttackSpec>) -> Result<Session> {
    build(config, profiles, attacks, true)
}

fn build(config: &SynthConfig, profiles: Vec<UserProfile>, attacks: Vec<AttackSpec>, zero_effort: bool) -> Result<Session> {
    config.validate()?;
    if profiles.len() < 2 {
        return Err(Error::validation("synthesis needs at least two profiles"));
    }
    if profiles.iter().any(|p| p.objects.len() != config.objects) {
        return Err(Error::validation("every profile needs one entry per object"));
    }
    let by_id: BTreeMap<&str, &UserProfile> = profiles.iter().map(|p| (p.user_id.as_str(), p)).collect();
    if by_id.len() != profiles.len() {
        return Err(Error::validation("duplicate user profile"));
    }
    for a in &attacks {
        a.validate()?;
        for u in [&a.attacker_id, &a.victim_id] {
            if !by_id.contains_key(u.as_str()) {
                return Err(Error::validation(format!("attack references unknown user {u}")));
            }
        }
        if a.attacker_id == a.victim_id {
            return Err(Error::validation("an attacker cannot target themselves"));
        }
    }

    let layout = Layout::new(config.objects, config.seed);
    let mut tl = Timeline {
        layout: &layout,
        recorder: Recorder {
            streams: BTreeMap::new(),
            imu_rate: config.imu_rate,
            spl_rate: config.spl_rate,
        },
        contacts: Vec::new(),
        runs: Vec::new(),
        clock: 10.0,
        seed: config.seed,
    };
    let regular = if zero_effort { config.runs } else { 0 };
    for r in 0..regular {
        for p in &profiles {
            let meta = RunMetadata {
                run_id: run_id(&p.user_id, r),
                user_id: p.user_id.clone(),
                attack: AttackKind::None,
                victim_id: None,
                start: None,
                end: None,
            };
            tl.run(meta, p, config.intra_jitter, 0.0);
        }
    }
    for a in &attacks {
        let mimic = UserProfile::imitate(by_id[a.attacker_id.as_str()], by_id[a.victim_id.as_str()], a.alpha);
        for r in 0..config.attack_runs {
            let meta = RunMetadata {
                run_id: format!("A-{}-{}-{:02}", a.attacker_id, a.victim_id, r + 1),
                user_id: a.attacker_id.clone(),
                attack: a.kind,
                victim_id: Some(a.victim_id.clone()),
                start: None,
                end: None,
            };
            tl.run(meta, &mimic, config.intra_jitter, a.jitter);
        }
    }
    let Timeline {
        recorder,
        contacts,
        runs,
        ..
    } = tl;
    let recordings = recorder.streams.into_values().collect();
    let dataset = Dataset::new(None, recordings, contacts, runs, layout.colocation())?;
    Ok(Session {
        dataset,
        provenance: Provenance {
            config: config.clone(),
            layout,
            profiles,
            attacks,
        },
    })
}

/// Only the attack runs of `spec`, on the configuration's layout and
/// profiles.
pub fn generate_attacks(config: &SynthConfig, spec: &AttackSpec, runs: usize) -> Result<Session> {
    let cfg = SynthConfig {
        attack_runs: runs,
        ..config.clone()
    };
    build(&cfg, profiles(&cfg), vec![spec.clone()], false)
}

/// Writes the ingestion files plus `synth-config.json`.
pub fn write_session(session: &Session, dir: &Path) -> Result<()> {
    write_dir(&session.dataset, dir)?;
    let path = dir.join(CONFIG_FILE);
    let text = serde_json::to_string_pretty(&session.provenance)? + "\n";
    std::fs::write(&path, text).map_err(|e| Error::io(path, e))
}
