//! Acceptance criteria, one PASS/FAIL line each. Runs as a plain binary
//! (`harness = false`) and exits non-zero if any criterion fails.

mod common;

use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::Rng;
use sha2::{Digest, Sha256};
use stegkit::bmp::synth_bmp;
use stegkit::{
    bit_error_rate, capacity, echo_embed, echo_extract, embed, estimate_echo_delay, extract,
    pack_byte, parse_bmp, parse_wav, unpack_byte, write_bmp, write_wav, BitSequence, EchoParams,
    LsbError, PackedChannels, Payload, WavClip,
};

use common::{appendix_encrypt, noise_clip, random_cover, random_ext, rng};

type Outcome = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    ensure(elapsed < limit, || {
        format!("took {elapsed:?}, limit {limit:?}")
    })
}

fn c1_worked_example() -> Outcome {
    let start = Instant::now();
    let cover = PackedChannels::new(0b1001_0011, 0b1101_0101, 0b1011_0011);
    let packed = pack_byte(cover, 97);
    let ch = unpack_byte(packed);
    let elapsed = start.elapsed();
    ensure(
        packed == PackedChannels::new(0b1001_0001, 0b1101_0100, 0b1011_0001),
        || format!("pack gave {packed:?}"),
    )?;
    ensure(ch == 97, || format!("unpack gave {ch}"))?;
    within(elapsed, Duration::from_millis(1))?;
    Ok(format!(
        "(r,g,b)=({:08b},{:08b},{:08b}) -> 'a'",
        packed.r, packed.g, packed.b
    ))
}

fn c2_exhaustive_pack() -> Outcome {
    let mut rng = rng(2);
    let carriers: Vec<PackedChannels> = (0..1000)
        .map(|_| PackedChannels::new(rng.gen(), rng.gen(), rng.gen()))
        .collect();
    let start = Instant::now();
    let mut checked = 0usize;
    for ch in 0..=255u8 {
        for &c in &carriers {
            let got = unpack_byte(pack_byte(c, ch));
            ensure(got == ch, || format!("{c:?} ch {ch} -> {got}"))?;
            checked += 1;
        }
    }
    within(start.elapsed(), Duration::from_secs(1))?;
    Ok(format!("{checked} (byte, carrier) pairs"))
}

/// Criteria 3 and 5 share one corpus.
struct RoundTripCorpus {
    covers: Vec<Vec<u8>>,
    payloads: Vec<Payload>,
}

fn build_corpus() -> RoundTripCorpus {
    let mut rng = rng(3);
    let mut covers = Vec::new();
    let mut payloads = Vec::new();
    for i in 0..200 {
        let w = rng.gen_range(100..=512);
        let h = rng.gen_range(100..=512);
        let cover = random_cover(&mut rng, w, h);
        let cap = capacity(&parse_bmp(&cover).unwrap());
        let size = match i {
            0 => 1,
            1 => cap,
            _ => rng.gen_range(1..=cap),
        };
        let data: Vec<u8> = (0..size).map(|_| rng.gen()).collect();
        payloads.push(Payload::new(data, &random_ext(&mut rng)).unwrap());
        covers.push(cover);
    }
    RoundTripCorpus { covers, payloads }
}

fn c3_image_round_trip(corpus: &RoundTripCorpus) -> Outcome {
    let start = Instant::now();
    let mut total = 0usize;
    for (i, (cover, payload)) in corpus.covers.iter().zip(&corpus.payloads).enumerate() {
        let cover = parse_bmp(cover).unwrap();
        let stego = embed(&cover, payload).map_err(|e| format!("pair {i}: embed: {e}"))?;
        let bytes = write_bmp(&stego);
        let back = extract(&parse_bmp(&bytes).unwrap()).map_err(|e| format!("pair {i}: {e}"))?;
        ensure(&back == payload, || format!("pair {i}: payload mismatch"))?;
        total += payload.data().len();
    }
    within(start.elapsed(), Duration::from_secs(10))?;
    Ok(format!(
        "200 pairs, {total} payload bytes, sizes 1..=capacity"
    ))
}

fn c4_wire_format() -> Outcome {
    let start = Instant::now();
    let cover_bytes = random_cover(&mut rng(4), 100, 100);
    let cover = parse_bmp(&cover_bytes).unwrap();
    let stego = write_bmp(&embed(&cover, &Payload::new(b"abc".to_vec(), "txt").unwrap()).unwrap());

    let reference = appendix_encrypt(&cover_bytes, b"abc", b"txt");
    ensure(stego == reference, || {
        "stego differs from reference encoder".into()
    })?;

    let mut allowed: Vec<usize> = (6..10).chain(40..44).collect();
    for group in [3333usize, 6666, 9999] {
        allowed.extend((0..3).map(|j| 54 + 3 * group + j));
    }
    for (i, (&a, &b)) in cover_bytes.iter().zip(&stego).enumerate() {
        if a == b {
            continue;
        }
        ensure(allowed.contains(&i), || {
            format!("unexpected change at byte {i}")
        })?;
        if i >= 54 {
            let mask = if (i - 54) % 3 == 0 { 0xFC } else { 0xF8 };
            ensure(a & mask == b & mask, || {
                format!("high bits changed at byte {i}")
            })?;
        }
    }
    ensure(stego[6..10] == 3u32.to_le_bytes(), || {
        "reserved != 3".into()
    })?;
    ensure(&stego[40..44] == b"1txt", || "tag != 1txt".into())?;
    within(start.elapsed(), Duration::from_secs(1))?;
    Ok("diff confined to 6-9, 40-43, groups 3333/6666/9999 low bits".into())
}

fn c5_distortion_bound(corpus: &RoundTripCorpus) -> Outcome {
    let mut worst = [0u8; 3];
    for (i, (cover_bytes, payload)) in corpus.covers.iter().zip(&corpus.payloads).enumerate() {
        let cover = parse_bmp(cover_bytes).unwrap();
        let stego = embed(&cover, payload).map_err(|e| e.to_string())?;
        for (j, (&a, &b)) in cover.carrier.iter().zip(&stego.carrier).enumerate() {
            let d = a.abs_diff(b);
            let lane = j % 3;
            let bound = if lane == 0 { 3 } else { 7 };
            ensure(d <= bound, || {
                format!("pair {i}: carrier byte {j} moved by {d}")
            })?;
            worst[lane] = worst[lane].max(d);
        }
    }
    Ok(format!("max |diff| per lane {worst:?}"))
}

fn c6_marker_rejection() -> Outcome {
    let mut rng = rng(6);
    let covers: Vec<Vec<u8>> = (0..50)
        .map(|_| {
            let (w, h) = (rng.gen_range(1..=64), rng.gen_range(1..=64));
            random_cover(&mut rng, w, h)
        })
        .collect();
    let start = Instant::now();
    for (i, c) in covers.iter().enumerate() {
        let got = extract(&parse_bmp(c).unwrap());
        ensure(got == Err(LsbError::NotGenuineStego), || {
            format!("cover {i}: {got:?}")
        })?;
    }
    within(start.elapsed(), Duration::from_secs(1))?;
    Ok("50/50 pristine covers rejected".into())
}

fn fixture_corpus() -> (Vec<Vec<u8>>, Vec<Vec<u8>>) {
    let mut rng = rng(7);
    let mut bmps: Vec<Vec<u8>> = (1..=12)
        .map(|w| random_cover(&mut rng, w, 1 + w % 5))
        .collect();
    bmps.push(random_cover(&mut rng, 100, 100));
    let stego = embed(
        &parse_bmp(&bmps[12]).unwrap(),
        &Payload::new(b"abc".to_vec(), "txt").unwrap(),
    )
    .unwrap();
    bmps.push(write_bmp(&stego));

    let mut wavs = vec![
        write_wav(&WavClip::new(8000, 1, Vec::new())),
        write_wav(&noise_clip(&mut rng, 8000, 8000, 8000)),
        write_wav(&WavClip::new(
            44100,
            2,
            (0..2000).map(|_| rng.gen()).collect(),
        )),
    ];
    // fmt with cbSize, LIST before data, odd chunk after.
    let mut fancy =
        b"RIFF\0\0\0\0WAVEfmt \x12\0\0\0\x01\0\x01\0\x40\x1f\0\0\x80\x3e\0\0\x02\0\x10\0\0\0"
            .to_vec();
    fancy.extend_from_slice(b"LIST\x04\0\0\0INFO");
    fancy.extend_from_slice(b"data\x08\0\0\0\x01\x00\xff\xff\x00\x80\xff\x7f");
    fancy.extend_from_slice(b"junk\x03\0\0\0abc\0");
    let len = (fancy.len() - 8) as u32;
    fancy[4..8].copy_from_slice(&len.to_le_bytes());
    wavs.push(fancy);
    (bmps, wavs)
}

fn c7_serialization() -> Outcome {
    let (bmps, wavs) = fixture_corpus();
    let start = Instant::now();
    for (i, f) in bmps.iter().enumerate() {
        let img = parse_bmp(f).map_err(|e| format!("bmp {i}: {e}"))?;
        ensure(&write_bmp(&img) == f, || {
            format!("bmp fixture {i} not bit-exact")
        })?;
    }
    for (i, f) in wavs.iter().enumerate() {
        let clip = parse_wav(f).map_err(|e| format!("wav {i}: {e}"))?;
        ensure(&write_wav(&clip) == f, || {
            format!("wav fixture {i} not bit-exact")
        })?;
    }
    within(start.elapsed(), Duration::from_secs(1))?;
    Ok(format!(
        "{} BMP + {} WAV fixtures byte-exact",
        bmps.len(),
        wavs.len()
    ))
}

fn echo_trial(seed: u64, params: &EchoParams) -> Result<f64, String> {
    let mut rng = rng(seed);
    let cover = noise_clip(&mut rng, 8000, 80_000, 8000);
    let bits = BitSequence((0..64).map(|_| rng.gen()).collect());
    let stego = echo_embed(&cover, &bits, params).map_err(|e| e.to_string())?;
    let got = echo_extract(&stego, 64, params).map_err(|e| e.to_string())?;
    bit_error_rate(&bits, &got).map_err(|e| e.to_string())
}

fn c8_echo_round_trip() -> Outcome {
    let start = Instant::now();
    let defaults = EchoParams::default();
    for seed in 0..20 {
        let ber = echo_trial(800 + seed, &defaults)?;
        ensure(ber == 0.0, || format!("seed {seed}: BER {ber}"))?;
    }
    let mut sweep = Vec::new();
    for decay in [0.3, 0.5, 0.7] {
        let params = EchoParams { decay, ..defaults };
        let mut sum = 0.0;
        for seed in 0..20 {
            sum += echo_trial(900 + seed, &params)?;
        }
        let mean = sum / 20.0;
        ensure(mean <= 0.02, || format!("decay {decay}: mean BER {mean}"))?;
        sweep.push(format!("{decay}:{mean}"));
    }
    within(start.elapsed(), Duration::from_secs(30))?;
    Ok(format!(
        "20 seeds BER 0; decay sweep mean BER {}",
        sweep.join(" ")
    ))
}

fn c9_delay_estimation() -> Outcome {
    let start = Instant::now();
    let params = EchoParams::default();
    let mut rng = rng(9);
    let mut hits = 0;
    for _ in 0..100 {
        let cover = noise_clip(&mut rng, 8000, 2 * params.segment_len, 8000);
        let stego = echo_embed(&cover, &BitSequence(vec![true, true]), &params)
            .map_err(|e| e.to_string())?;
        let est = estimate_echo_delay(&stego, 1, 200, &params).map_err(|e| e.to_string())?;
        if est.delay == 100 {
            hits += 1;
        }
    }
    ensure(hits >= 95, || {
        format!("only {hits}/100 trials found delay 100")
    })?;
    within(start.elapsed(), Duration::from_secs(10))?;
    Ok(format!("{hits}/100 trials returned 100"))
}

fn sha256(path: &Path) -> Vec<u8> {
    Sha256::digest(fs::read(path).unwrap()).to_vec()
}

fn stegkit(args: &[&str]) -> i32 {
    Command::new(env!("CARGO_BIN_EXE_stegkit"))
        .args(args)
        .output()
        .expect("run stegkit")
        .status
        .code()
        .unwrap_or(-1)
}

fn c10_cli() -> Outcome {
    let start = Instant::now();
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let p = |name: &str| dir.path().join(name);
    let s = |name: &str| p(name).to_str().unwrap().to_owned();

    let mut rng = rng(10);
    fs::write(p("cover.bmp"), random_cover(&mut rng, 128, 128)).unwrap();
    let payload: Vec<u8> = (0..10_240).map(|_| rng.gen()).collect();
    fs::write(p("secret.bin"), &payload).unwrap();
    fs::create_dir(p("out")).unwrap();

    let code = stegkit(&[
        "embed",
        "--cover",
        &s("cover.bmp"),
        "--payload",
        &s("secret.bin"),
        "--out",
        &s("e.bmp"),
    ]);
    ensure(code == 0, || format!("embed exit {code}"))?;
    ensure(
        fs::metadata(p("e.bmp")).unwrap().len() == fs::metadata(p("cover.bmp")).unwrap().len(),
        || "stego length differs from cover".into(),
    )?;
    let code = stegkit(&["extract", "--stego", &s("e.bmp"), "--out-dir", &s("out")]);
    ensure(code == 0, || format!("extract exit {code}"))?;
    ensure(
        sha256(&p("out/org.bin")) == sha256(&p("secret.bin")),
        || "extracted checksum differs".into(),
    )?;

    // Documented failure codes.
    fs::create_dir(p("fail")).unwrap();
    fs::write(
        p("notbmp.bmp"),
        b"PNG not a bitmap at all, just some text padding it out......",
    )
    .unwrap();
    let mut corrupt = fs::read(p("e.bmp")).unwrap();
    corrupt[6..10].copy_from_slice(&u32::MAX.to_le_bytes());
    fs::write(p("corrupt.bmp"), corrupt).unwrap();
    fs::write(p("small.bmp"), synth_bmp(10, 10, |_, _| [1, 2, 3])).unwrap();
    fs::write(
        p("short.wav"),
        write_wav(&WavClip::new(8000, 1, vec![0; 100])),
    )
    .unwrap();

    let cases: [(&str, Vec<String>, i32); 6] = [
        (
            "pristine extract",
            vec![
                "extract".into(),
                "--stego".into(),
                s("cover.bmp"),
                "--out-dir".into(),
                s("fail"),
            ],
            4,
        ),
        (
            "corrupt metadata",
            vec![
                "extract".into(),
                "--stego".into(),
                s("corrupt.bmp"),
                "--out-dir".into(),
                s("fail"),
            ],
            4,
        ),
        (
            "not a bmp",
            vec!["capacity".into(), "--cover".into(), s("notbmp.bmp")],
            2,
        ),
        (
            "over capacity",
            vec![
                "embed".into(),
                "--cover".into(),
                s("small.bmp"),
                "--payload".into(),
                s("secret.bin"),
                "--out".into(),
                s("fail/x.bmp"),
            ],
            3,
        ),
        (
            "too many bits",
            vec![
                "audio-embed".into(),
                "--cover".into(),
                s("short.wav"),
                "--bits".into(),
                s("secret.bin"),
                "--out".into(),
                s("fail/x.wav"),
            ],
            3,
        ),
        ("usage", vec!["embed".into(), "--cover".into()], 5),
    ];
    for (name, args, want) in &cases {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let code = stegkit(&args);
        ensure(code == *want, || {
            format!("{name}: exit {code}, want {want}")
        })?;
    }
    let leftovers = fs::read_dir(p("fail")).unwrap().count();
    ensure(leftovers == 0, || {
        format!("{leftovers} files left behind by failed runs")
    })?;
    within(start.elapsed(), Duration::from_secs(5))?;
    Ok("10 KiB payload checksum-exact; exit codes 2/3/4/5 verified".into())
}

fn main() {
    let corpus = build_corpus();
    let criteria: Vec<Criterion<'_>> = vec![
        ("C1 worked-example fidelity", Box::new(c1_worked_example)),
        (
            "C2 pack/unpack exhaustive oracle",
            Box::new(c2_exhaustive_pack),
        ),
        (
            "C3 image round trip",
            Box::new(|| c3_image_round_trip(&corpus)),
        ),
        ("C4 wire-format conformance", Box::new(c4_wire_format)),
        (
            "C5 distortion bound",
            Box::new(|| c5_distortion_bound(&corpus)),
        ),
        ("C6 marker rejection", Box::new(c6_marker_rejection)),
        ("C7 BMP/WAV serialization", Box::new(c7_serialization)),
        ("C8 echo round trip", Box::new(c8_echo_round_trip)),
        ("C9 delay estimation", Box::new(c9_delay_estimation)),
        ("C10 CLI end-to-end", Box::new(c10_cli)),
    ];

    let mut failed = 0;
    for (name, run) in &criteria {
        let start = Instant::now();
        match run() {
            Ok(detail) => println!("PASS {name}: {detail} [{:?}]", start.elapsed()),
            Err(why) => {
                failed += 1;
                println!("FAIL {name}: {why} [{:?}]", start.elapsed());
            }
        }
    }
    println!("{} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
