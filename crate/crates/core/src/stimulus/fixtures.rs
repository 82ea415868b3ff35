//! Deterministic synthetic stand-ins for the experiment's source recordings.
//!
//! The real speech and noise recordings are third-party material, so tests,
//! demos and the `prepare --synthetic` path use these generators instead.
//! Each generator is seeded, produces 48 kHz mono, and is shaped to the peak
//! level and crest factor of the material it stands in for: peaks follow the
//! raw recordings, crest factors follow the dynamics-processed versions that
//! were actually played.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::audio::{AudioBuffer, SAMPLE_RATE_HZ};
use crate::condition::{NoiseId, SignalId};
use crate::error::Result;
use crate::stimulus::gains::GainTable;
use crate::stimulus::levels::{apply_gain_db, measure_levels};
use crate::stimulus::noise::{mix_equal_energy, MIX_PEAK_DB};
use crate::stimulus::prepare::{prepare, NoiseSource, PrepareConfig, StimulusSet};

/// Length of every speech fixture.
pub const SPEECH_SECONDS: f64 = 3.0;
/// Length of noise fixtures; longer than speech so truncation is exercised.
pub const NOISE_SECONDS: f64 = 3.5;

/// Raw peak level and crest factor of a fixture, in dB.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Profile {
    pub peak_db: f64,
    pub crest_db: f64,
}

pub fn signal_profile(id: SignalId) -> Profile {
    match id {
        SignalId::A => Profile { peak_db: -19.1, crest_db: 14.8 },
        SignalId::B => Profile { peak_db: -14.1, crest_db: 14.4 },
        SignalId::C => Profile { peak_db: -13.6, crest_db: 10.7 },
    }
}

pub const NOISE_B_PROFILE: Profile = Profile { peak_db: -9.7, crest_db: 6.9 };
pub const NOISE_C_PROFILE: Profile = Profile { peak_db: -2.3, crest_db: 7.9 };

struct Voice {
    f0_hz: f64,
    formants: [(f64, f64); 4],
    fricative_level: f64,
    seed: u64,
}

fn voice(id: SignalId) -> Voice {
    match id {
        SignalId::A => Voice {
            f0_hz: 115.0,
            formants: [(600.0, 90.0), (1150.0, 110.0), (2500.0, 160.0), (3400.0, 250.0)],
            fricative_level: 0.08,
            seed: 0xA11CE,
        },
        SignalId::B => Voice {
            f0_hz: 215.0,
            formants: [(750.0, 100.0), (1500.0, 120.0), (2800.0, 180.0), (3900.0, 260.0)],
            fricative_level: 0.10,
            seed: 0xB0B,
        },
        SignalId::C => Voice {
            f0_hz: 245.0,
            formants: [(850.0, 110.0), (1900.0, 140.0), (3300.0, 200.0), (4700.0, 300.0)],
            fricative_level: 0.25,
            seed: 0xC0FFEE,
        },
    }
}

/// Resonance weight of a formant at `f_hz`.
fn formant_gain(f_hz: f64, formants: &[(f64, f64)]) -> f64 {
    formants
        .iter()
        .enumerate()
        .map(|(i, &(fc, bw))| {
            let x = (f_hz - fc) / (0.5 * bw);
            // later formants are weaker
            0.7f64.powi(i as i32) / (1.0 + x * x)
        })
        .sum::<f64>()
        + 0.02
}

/// Syllable-rate envelope: raised-cosine bursts separated by short gaps.
fn syllable_envelope(len: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let fs = SAMPLE_RATE_HZ as f64;
    let mut env = vec![0.0; len];
    let mut pos = (0.05 * fs) as usize;
    while pos < len {
        let dur = (rng.gen_range(0.12..0.26) * fs) as usize;
        let level = rng.gen_range(0.25..1.0);
        for i in 0..dur.min(len - pos) {
            let ph = i as f64 / dur as f64;
            env[pos + i] = level * (PI * ph).sin().powf(1.5);
        }
        let gap = if rng.gen_bool(0.25) {
            rng.gen_range(0.20..0.35)
        } else {
            rng.gen_range(0.03..0.10)
        };
        pos += dur + (gap * fs) as usize;
    }
    env
}

/// Crest-factor limiter: `tanh(drive * x)` with the drive found by bisection.
/// Signals already at or below `crest_db` pass through unchanged. The result
/// is scaled to unit peak.
pub fn limit_crest(buffer: &AudioBuffer, crest_db: f64) -> AudioBuffer {
    let x = buffer.samples();
    let peak = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if peak == 0.0 {
        return buffer.clone();
    }
    let unit: Vec<f64> = x.iter().map(|v| v / peak).collect();
    let crest = |d: f64| {
        let y: Vec<f64> = unit.iter().map(|v| (d * v).tanh()).collect();
        let l = measure_levels(&AudioBuffer::from_parts(y, buffer.sample_rate_hz())).unwrap();
        l.crest_db()
    };
    let shaped = if crest(1e-6) <= crest_db {
        unit
    } else {
        let (mut lo, mut hi) = (1e-6f64.ln(), 1e4f64.ln());
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if crest(mid.exp()) > crest_db {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let d = hi.exp();
        unit.iter().map(|v| (d * v).tanh()).collect()
    };
    let p = shaped.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    AudioBuffer::from_parts(shaped.into_iter().map(|v| v / p).collect(), buffer.sample_rate_hz())
}

fn scale_to_peak(buffer: AudioBuffer, peak_db: f64) -> AudioBuffer {
    let p = buffer.samples().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    apply_gain_db(&buffer, peak_db - 20.0 * p.log10()).expect("finite gain")
}

/// Voiced, syllabic speech-like signal for one of the three talkers.
pub fn speech_fixture(id: SignalId) -> AudioBuffer {
    let v = voice(id);
    let fs = SAMPLE_RATE_HZ as f64;
    let len = (SPEECH_SECONDS * fs) as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(v.seed);
    let env = syllable_envelope(len, &mut rng);

    let harmonics = (5_500.0 / v.f0_hz) as usize;
    let mut phases: Vec<f64> = (0..harmonics).map(|_| rng.gen_range(0.0..2.0 * PI)).collect();
    let drift = rng.gen_range(0.0..2.0 * PI);
    let mut out = vec![0.0; len];
    let mut hp_state = 0.0;
    for (n, o) in out.iter_mut().enumerate() {
        let t = n as f64 / fs;
        // slow intonation contour with a little vibrato
        let f0 = v.f0_hz * (1.0 + 0.12 * (2.0 * PI * 0.7 * t + drift).sin() + 0.01 * (2.0 * PI * 5.5 * t).sin());
        let mut voiced = 0.0;
        for (k, ph) in phases.iter_mut().enumerate() {
            let fk = f0 * (k + 1) as f64;
            if fk < 0.45 * fs {
                voiced += formant_gain(fk, &v.formants) / (k + 1) as f64 * ph.sin();
            }
            *ph += 2.0 * PI * fk / fs;
            if *ph > 2.0 * PI {
                *ph -= 2.0 * PI;
            }
        }
        // fricative noise: first difference of white noise, gated by the
        // envelope's decaying edges
        let w: f64 = rng.gen_range(-1.0..1.0);
        let hiss = w - hp_state;
        hp_state = w;
        let e = env[n];
        *o = e * voiced + v.fricative_level * hiss * e * (1.0 - e);
    }
    let buf = AudioBuffer::from_parts(out, SAMPLE_RATE_HZ);
    let p = signal_profile(id);
    scale_to_peak(limit_crest(&buf, p.crest_db), p.peak_db)
}

/// Two-pole resonator used to colour noise sources.
struct Resonator {
    b0: f64,
    a1: f64,
    a2: f64,
    y1: f64,
    y2: f64,
}

impl Resonator {
    fn new(f_hz: f64, q: f64) -> Self {
        let w = 2.0 * PI * f_hz / SAMPLE_RATE_HZ as f64;
        let r = 1.0 - w / (2.0 * q);
        Self {
            b0: 1.0 - r,
            a1: 2.0 * r * w.cos(),
            a2: -r * r,
            y1: 0.0,
            y2: 0.0,
        }
    }

    fn tick(&mut self, x: f64) -> f64 {
        let y = self.b0 * x + self.a1 * self.y1 + self.a2 * self.y2;
        self.y2 = self.y1;
        self.y1 = y;
        y
    }
}

fn noise_len() -> usize {
    (NOISE_SECONDS * SAMPLE_RATE_HZ as f64) as usize
}

/// Dense crowd of cheering voices: many resonant noise bands with slow
/// independent swells.
pub fn crowd_fixture() -> AudioBuffer {
    let fs = SAMPLE_RATE_HZ as f64;
    let len = noise_len();
    let mut rng = ChaCha8Rng::seed_from_u64(0xC4EE5);
    let mut out = vec![0.0; len];
    for _ in 0..48 {
        let mut res = Resonator::new(rng.gen_range(250.0..3_200.0), rng.gen_range(2.0..6.0));
        let rate = rng.gen_range(0.3..2.5);
        let phase = rng.gen_range(0.0..2.0 * PI);
        let depth = rng.gen_range(0.2..0.7);
        for (n, o) in out.iter_mut().enumerate() {
            let t = n as f64 / fs;
            let am = 1.0 - depth * (0.5 + 0.5 * (2.0 * PI * rate * t + phase).sin());
            *o += am * res.tick(rng.gen_range(-1.0..1.0));
        }
    }
    let buf = AudioBuffer::from_parts(out, SAMPLE_RATE_HZ);
    scale_to_peak(limit_crest(&buf, NOISE_B_PROFILE.crest_db), NOISE_B_PROFILE.peak_db)
}

/// Five urban/construction sources for the equal-energy mix: household hum,
/// power drill, hammer drill, site rumble with clanks, and a rotary cutter.
pub fn urban_sources() -> Vec<AudioBuffer> {
    let fs = SAMPLE_RATE_HZ as f64;
    let len = noise_len();
    let mut rng = ChaCha8Rng::seed_from_u64(0x0DB5);
    let mut sources = Vec::with_capacity(5);

    // household hum: mains harmonics over pink-ish noise
    let mut lp = Resonator::new(400.0, 0.7);
    let hum: Vec<f64> = (0..len)
        .map(|n| {
            let t = n as f64 / fs;
            let tones: f64 = (1..=6).map(|k| (2.0 * PI * 50.0 * k as f64 * t).sin() / k as f64).sum();
            0.4 * tones + 3.0 * lp.tick(rng.gen_range(-1.0..1.0))
        })
        .collect();
    sources.push(hum);

    // power drill: buzzing motor with speed wobble
    let mut ph = 0.0f64;
    let drill: Vec<f64> = (0..len)
        .map(|n| {
            let t = n as f64 / fs;
            let f = 165.0 * (1.0 + 0.03 * (2.0 * PI * 1.3 * t).sin());
            ph = (ph + 2.0 * PI * f / fs) % (2.0 * PI);
            let buzz: f64 = (1..=12).map(|k| (k as f64 * ph).sin() / k as f64).sum();
            buzz + 0.2 * rng.gen_range(-1.0..1.0)
        })
        .collect();
    sources.push(drill);

    // hammer drill: 24 Hz impacts of decaying resonant noise
    let mut res = Resonator::new(1_800.0, 3.0);
    let period = (fs / 24.0) as usize;
    let hammer: Vec<f64> = (0..len)
        .map(|n| {
            let since = (n % period) as f64 / fs;
            let env = 0.35 + (-since / 0.012).exp();
            env * res.tick(rng.gen_range(-1.0..1.0))
        })
        .collect();
    sources.push(hammer);

    // site rumble: low-passed noise with sparse metallic clanks
    let mut rumble = Resonator::new(120.0, 0.8);
    let mut clank = Resonator::new(2_600.0, 40.0);
    let mut clank_env = 0.0f64;
    let site: Vec<f64> = (0..len)
        .map(|_| {
            if rng.gen_bool(2.0 / fs) {
                clank_env = 1.0;
            }
            clank_env *= 0.9995;
            let kick = if clank_env > 0.999 { 1.0 } else { 0.0 };
            4.0 * rumble.tick(rng.gen_range(-1.0..1.0)) + 0.2 * clank_env * clank.tick(kick + 0.1 * rng.gen_range(-1.0..1.0))
        })
        .collect();
    sources.push(site);

    // rotary cutter: high whine with harmonics over broadband hiss
    let mut ph = 0.0f64;
    let cutter: Vec<f64> = (0..len)
        .map(|n| {
            let t = n as f64 / fs;
            let f = 2_900.0 * (1.0 + 0.01 * (2.0 * PI * 0.8 * t).sin());
            ph = (ph + 2.0 * PI * f / fs) % (2.0 * PI);
            ph.sin() + 0.3 * (2.0 * ph).sin() + 0.4 * rng.gen_range(-1.0..1.0)
        })
        .collect();
    sources.push(cutter);

    sources
        .into_iter()
        .map(|s| {
            let buf = AudioBuffer::from_parts(s, SAMPLE_RATE_HZ);
            // field recordings arrive dynamics-processed
            scale_to_peak(limit_crest(&buf, 7.0), -3.0)
        })
        .collect()
}

/// The five urban sources mixed at equal energy, with the dynamics of a
/// compressed field recording applied to the sum.
pub fn urban_mix_fixture() -> AudioBuffer {
    let mix = mix_equal_energy(&urban_sources(), MIX_PEAK_DB).expect("fixture sources are valid");
    scale_to_peak(limit_crest(&mix, NOISE_C_PROFILE.crest_db), NOISE_C_PROFILE.peak_db)
}

/// Seed of the uniform noise in [`synthetic_set`].
pub const UNIFORM_NOISE_SEED: u64 = 0x5eed;

/// Speech and noise sources in the shape [`prepare`] takes.
pub type PrepareInputs = (Vec<(SignalId, AudioBuffer)>, Vec<(NoiseId, NoiseSource)>);

/// Raw inputs for [`prepare`]: three speech fixtures, uniform noise, the crowd
/// fixture and the urban mix.
pub fn synthetic_inputs() -> PrepareInputs {
    let signals = SignalId::ALL.iter().map(|&id| (id, speech_fixture(id))).collect();
    let noises = vec![
        (NoiseId::A, NoiseSource::Uniform { seed: UNIFORM_NOISE_SEED }),
        (NoiseId::B, NoiseSource::Recording(crowd_fixture())),
        (NoiseId::C, NoiseSource::Recording(urban_mix_fixture())),
    ];
    (signals, noises)
}

/// The synthetic inputs prepared with the default gains and level policy.
pub fn synthetic_set() -> Result<StimulusSet> {
    let (signals, noises) = synthetic_inputs();
    prepare(signals, noises, GainTable::default(), &PrepareConfig::default())
}
