//! Benchmark suites: a bundled lexer, an input generator and a size ladder.
//!
//! Each run reports wall time and the number of input symbols read by the
//! scorers. Read counts do not depend on the machine, so they are what the
//! growth checks use.

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;
use std::time::Instant;

use derivlex_core::{
    LexerId, LexerTable, ReadCounter, Runner, ScoreMode, Storage, TokenStream, DEFAULT_FUEL,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::spec::load_spec;

pub const JSON_SPEC: &str = include_str!("../specs/json.vl");
pub const XML_SPEC: &str = include_str!("../specs/xml.vl");
pub const ADVERSARIAL_SPEC: &str = include_str!("../specs/adversarial.vl");

/// Seed of every generated input.
pub const SEED: u64 = 0x5eed_1e7e;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Suite {
    Json,
    Xml,
    Adversarial,
}

impl Suite {
    pub const ALL: [Suite; 3] = [Suite::Json, Suite::Xml, Suite::Adversarial];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Json => "json",
            Suite::Xml => "xml",
            Suite::Adversarial => "adversarial",
        }
    }

    pub fn spec_text(self) -> &'static str {
        match self {
            Suite::Json => JSON_SPEC,
            Suite::Xml => XML_SPEC,
            Suite::Adversarial => ADVERSARIAL_SPEC,
        }
    }

    pub fn table(self) -> LexerTable {
        load_spec(self.spec_text()).expect("bundled specs compile")
    }

    pub fn input(self, n: usize) -> Vec<u8> {
        match self {
            Suite::Json => gen_json_input(n),
            Suite::Xml => gen_xml_input(n),
            Suite::Adversarial => gen_adversarial_input(n),
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| format!("unknown suite `{s}` (expected json, xml or adversarial)"))
    }
}

pub fn mode_name(mode: ScoreMode) -> &'static str {
    match mode {
        ScoreMode::Naive => "naive",
        ScoreMode::Fast => "fast",
    }
}

pub fn parse_mode(s: &str) -> Result<ScoreMode, String> {
    match s {
        "naive" => Ok(ScoreMode::Naive),
        "fast" => Ok(ScoreMode::Fast),
        _ => Err(format!("unknown mode `{s}` (expected naive or fast)")),
    }
}

/// Appends whole tokens from `next` while they fit in `n` bytes, then pads
/// with spaces to exactly `n`.
fn fill(n: usize, mut next: impl FnMut(&mut Vec<u8>)) -> Vec<u8> {
    let mut out = Vec::with_capacity(n);
    let mut piece = Vec::new();
    loop {
        piece.clear();
        next(&mut piece);
        if out.len() + piece.len() > n {
            break;
        }
        out.extend_from_slice(&piece);
    }
    out.resize(n, b' ');
    out
}

const COUNTRIES: &[(&str, &str)] = &[
    ("United States", "USA"),
    ("Canada", "CAN"),
    ("Mexico", "MEX"),
    ("Brazil", "BRA"),
    ("France", "FRA"),
    ("Germany", "DEU"),
    ("Japan", "JPN"),
    ("Kenya", "KEN"),
    ("India", "IND"),
    ("New Zealand", "NZL"),
];

/// Synthetic yearly GDP records as a JSON array, `n` bytes long.
///
/// Each record holds a country name and code (strings), a year (integer),
/// the GDP in dollars (float with exponent), a growth rate (signed decimal),
/// an `estimated` flag and an optional note (`null` or an escaped string).
/// Records are separated by `,\n` and indented with two spaces. As many
/// whole records as fit are written, the array is closed and the rest is
/// padded with spaces.
pub fn gen_json_input(n: usize) -> Vec<u8> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    if n < 2 {
        return vec![b' '; n];
    }
    let mut out = b"[".to_vec();
    loop {
        let record = json_record(&mut rng, out.len() == 1);
        if out.len() + record.len() + 2 > n {
            break;
        }
        out.extend_from_slice(&record);
    }
    out.extend_from_slice(if out.len() == 1 { b"]" } else { b"\n]" });
    out.resize(n, b' ');
    out
}

fn json_record(rng: &mut ChaCha8Rng, first: bool) -> Vec<u8> {
    let (name, code) = *COUNTRIES.choose(rng).unwrap();
    let year = rng.gen_range(1960..2024);
    let gdp = rng.gen_range(1.0e9..2.5e13f64);
    let growth = rng.gen_range(-8.0..12.0f64);
    let mut t: Vec<String> = Vec::new();
    if !first {
        t.push(",".into());
    }
    t.push("\n  ".into());
    t.push("{".into());
    let field = |t: &mut Vec<String>, key: &str, value: String, last: bool| {
        t.push(format!("\"{key}\""));
        t.push(":".into());
        t.push(" ".into());
        t.push(value);
        if !last {
            t.push(",".into());
            t.push(" ".into());
        }
    };
    field(&mut t, "country", format!("\"{name}\""), false);
    field(&mut t, "code", format!("\"{code}\""), false);
    field(&mut t, "year", year.to_string(), false);
    field(
        &mut t,
        "gdp",
        format!("{gdp:.6e}").replace("e", "E+"),
        false,
    );
    field(&mut t, "growth", format!("{growth:.3}"), false);
    field(&mut t, "estimated", rng.gen_bool(0.2).to_string(), false);
    let note = if rng.gen_bool(0.7) {
        "null".to_string()
    } else {
        "\"revised \\\"q4\\\" figure\"".to_string()
    };
    field(&mut t, "note", note, true);
    t.push("}".into());
    t.concat().into_bytes()
}

/// Nested XML elements with attributes, text, comments and newlines, `n`
/// bytes long.
pub fn gen_xml_input(n: usize) -> Vec<u8> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut open: Vec<&str> = Vec::new();
    const TAGS: &[&str] = &["record", "country", "value", "note", "year"];
    const WORDS: &[&str] = &["GDP", "current", "US$", "estimate", "1999", "4.5E+12"];
    fill(n, |piece| {
        let roll = rng.gen_range(0..10);
        let s = match roll {
            0..=2 if open.len() < 6 => {
                let tag = *TAGS.choose(&mut rng).unwrap();
                open.push(tag);
                if rng.gen_bool(0.5) {
                    format!("<{tag} id=\"{}\" unit=\"usd\">", rng.gen_range(0..1000))
                } else {
                    format!("<{tag}>")
                }
            }
            3..=4 if !open.is_empty() => format!("</{}>", open.pop().unwrap()),
            5 => format!("<{} />", TAGS.choose(&mut rng).unwrap()),
            6 => "<!-- source: world bank -->".into(),
            7 => "\n".into(),
            _ => format!(" {}", WORDS.choose(&mut rng).unwrap()),
        };
        piece.extend_from_slice(s.as_bytes());
    })
}

/// `n` copies of `c`.
pub fn gen_adversarial_input(n: usize) -> Vec<u8> {
    vec![b'c'; n]
}

#[derive(Clone, PartialEq, Debug)]
pub struct Row {
    pub suite: Suite,
    pub size: usize,
    pub mode: ScoreMode,
    pub wall_ms: f64,
    pub char_reads: u64,
    pub tokens: usize,
    /// The run ended with the eof token.
    pub clean: bool,
}

/// Tokenizes `input` with the suite's lexer and counts symbol reads.
pub fn tokenize_counted<'a>(
    table: &LexerTable,
    input: &'a [u8],
    mode: ScoreMode,
) -> (TokenStream<'a>, u64) {
    let runner = Runner::with_meter(table, mode, ReadCounter::new());
    let stream = runner.tokenize_all(LexerId(0), input, DEFAULT_FUEL, Storage::new());
    (stream, runner.meter().get())
}

pub fn run_suite(suite: Suite, sizes: &[usize], mode: ScoreMode) -> Vec<Row> {
    let table = suite.table();
    sizes
        .iter()
        .map(|&size| {
            let input = suite.input(size);
            let start = Instant::now();
            let (stream, char_reads) = tokenize_counted(&table, &input, mode);
            Row {
                suite,
                size,
                mode,
                wall_ms: start.elapsed().as_secs_f64() * 1e3,
                char_reads,
                tokens: stream.tokens.len(),
                clean: stream.halt.is_eof(),
            }
        })
        .collect()
}

pub const CSV_HEADER: &str = "suite,size,mode,wall_ms,char_reads";

pub fn write_csv(out: &mut (impl Write + ?Sized), rows: &[Row]) -> io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{:.3},{}",
            r.suite,
            r.size,
            mode_name(r.mode),
            r.wall_ms,
            r.char_reads
        )?;
    }
    Ok(())
}

/// Least-squares slope of `log(reads)` against `log(size)`, over the points
/// where both are positive. `None` with fewer than two such points.
pub fn growth_exponent(points: &[(usize, u64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|(s, r)| *s > 0 && *r > 0)
        .map(|&(s, r)| ((s as f64).ln(), (r as f64).ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Some(sxy / sxx)
}

fn parse_size(s: &str) -> Result<usize, String> {
    let s = s.trim();
    let (digits, scale) = match s.strip_suffix(['k', 'K']) {
        Some(d) => (d, 1024),
        None => match s.strip_suffix(['m', 'M']) {
            Some(d) => (d, 1024 * 1024),
            None => (s, 1),
        },
    };
    digits
        .parse::<usize>()
        .map(|n| n * scale)
        .map_err(|_| format!("invalid size `{s}`"))
}

/// `1k,4k,16k` lists sizes; `1k..16k` doubles from the first bound up to
/// the second. `k` is 1024.
pub fn parse_sizes(spec: &str) -> Result<Vec<usize>, String> {
    if let Some((lo, hi)) = spec.split_once("..") {
        let (lo, hi) = (parse_size(lo)?, parse_size(hi)?);
        if lo == 0 || hi < lo {
            return Err(format!("invalid size range `{spec}`"));
        }
        let mut out = Vec::new();
        let mut n = lo;
        while n <= hi {
            out.push(n);
            n *= 2;
        }
        return Ok(out);
    }
    spec.split(',').map(parse_size).collect()
}
