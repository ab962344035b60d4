//! A small end-to-end fixture: dated speeches whose tax paragraphs lean
//! towards increase or decrease vocabulary ahead of signed exogenous tax
//! changes, plus the matching quarterly macro series.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::corpus::{Quarter, RawDocument};
use crate::econometrics::TsFrame;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FixtureSpec {
    pub start: Quarter,
    pub n_quarters: usize,
    pub docs_per_quarter: usize,
    pub paragraphs_per_doc: usize,
    pub units_per_paragraph: usize,
    /// Probability that a quarter carries a nonzero exogenous tax change.
    pub event_rate: f64,
    /// Share of tax-paragraph words drawn from the two lexicons.
    pub lexicon_share: f64,
    /// Probability that a lexicon word matches the sign of the coming change.
    pub lean: f64,
    pub seed: u64,
}

impl Default for FixtureSpec {
    fn default() -> Self {
        Self {
            start: Quarter { year: 1983, q: 1 },
            n_quarters: 100,
            docs_per_quarter: 2,
            paragraphs_per_doc: 3,
            units_per_paragraph: 30,
            event_rate: 0.55,
            lexicon_share: 0.3,
            lean: 0.75,
            seed: 1983,
        }
    }
}

pub struct Fixture {
    pub documents: Vec<RawDocument>,
    /// `gdp` and `revenue` (I(1) levels), `dt_pv`, `dt_impl`, `dt_exo`.
    pub series: TsFrame,
}

impl Fixture {
    pub fn to_jsonl(&self) -> String {
        self.documents
            .iter()
            .map(|d| serde_json::to_string(d).expect("documents serialize") + "\n")
            .collect()
    }

    /// Writes `speeches.jsonl` and `series.csv` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let docs = dir.join("speeches.jsonl");
        std::fs::write(&docs, self.to_jsonl()).map_err(|e| Error::io(&docs, e))?;
        let series = dir.join("series.csv");
        std::fs::write(&series, self.series.to_csv_string()).map_err(|e| Error::io(&series, e))
    }
}

const GENERAL_TAX: &[&str] = &[
    "tax", "tax", "tax", "taxes", "revenue", "income", "rate", "bracket", "code", "taxpayer", "payroll", "treasury",
    "deduction", "credit", "filing", "exemption", "withholding", "levy", "audit", "schedule", "estate", "property",
    "corporate", "capital", "dividend", "excise", "loophole", "shelter", "return", "liability", "threshold",
];
const INCREASE: &[&str] = &[
    "raise tax", "new tax", "deficit", "budget deficit", "fair share", "tax increase", "increase revenue",
    "reduce deficit", "fiscal responsibility", "additional revenue",
];
const DECREASE: &[&str] = &[
    "cut tax", "relief", "incentive", "economic growth", "create job", "lower tax", "reduction", "rate reduction",
    "ease burden", "boost economy",
];
const OTHER_TOPICS: &[&[&str]] = &[
    &[
        "army", "navy", "soldier", "war", "peace", "alliance", "missile", "troop", "security", "veteran", "pentagon",
        "weapon", "sailor", "marine", "pilot", "carrier", "submarine", "battle", "enemy", "ally", "deterrence",
        "treaty", "arsenal", "warhead", "command", "officer", "general", "admiral", "bomber", "patrol", "garrison",
        "combat", "frontier", "guard", "defense", "readiness",
    ],
    &[
        "school", "teacher", "student", "college", "classroom", "learning", "university", "reading", "literacy",
        "pupil", "campus", "tuition", "scholarship", "curriculum", "principal", "kindergarten", "diploma", "graduate",
        "textbook", "homework", "lesson", "science", "math", "library", "professor", "degree", "education", "grade",
        "exam", "semester", "lecture", "academy", "mentor", "tutor", "enrollment", "preschool",
    ],
    &[
        "hospital", "medicare", "doctor", "patient", "medicine", "insurance", "nurse", "clinic", "health", "medicaid",
        "surgeon", "disease", "cancer", "vaccine", "prescription", "drug", "pharmacy", "treatment", "therapy",
        "illness", "physician", "care", "coverage", "premium", "cure", "research", "epidemic", "diagnosis", "surgery",
        "wellness", "ambulance", "emergency", "infant", "elderly", "caregiver", "pediatric",
    ],
    &[
        "oil", "energy", "coal", "pipeline", "solar", "electricity", "gasoline", "reactor", "fuel", "nuclear", "wind",
        "turbine", "barrel", "refinery", "utility", "grid", "power", "plant", "emission", "carbon", "conservation",
        "efficiency", "hydro", "dam", "drill", "well", "petroleum", "methane", "battery", "uranium", "kilowatt",
        "voltage", "furnace", "heating", "cooling", "motor",
    ],
    &[
        "export", "import", "partner", "market", "border", "nation", "trade", "commerce", "quota", "embargo",
        "shipping", "port", "cargo", "merchant", "agreement", "customs", "dumping", "currency", "exchange", "wholesale",
        "surplus", "negotiation", "envoy", "ambassador", "summit", "diplomacy", "foreign", "overseas", "container",
        "freight", "harbor", "vessel", "route", "supplier", "buyer", "competitor",
    ],
    &[
        "farmer", "crop", "wheat", "harvest", "rural", "drought", "soil", "cattle", "grain", "corn", "soybean",
        "livestock", "barn", "tractor", "orchard", "dairy", "milk", "hog", "poultry", "ranch", "acre", "irrigation",
        "seed", "fertilizer", "pasture", "county", "village", "silo", "barley", "cotton", "tobacco", "fruit",
        "vegetable", "meadow", "plow", "herd",
    ],
];
const FILLER: &[&str] = &["the", "and", "of", "we", "our", "to", "a", "that", "will", "is", "for", "this"];

fn pick<'a, R: Rng>(rng: &mut R, pool: &[&'a str]) -> &'a str {
    pool[rng.random_range(0..pool.len())]
}

fn paragraph<R: Rng>(rng: &mut R, spec: &FixtureSpec, lean: f64) -> String {
    // lean > 0 tilts tax talk to increases, < 0 to decreases, 0 mixes both
    let units = spec.units_per_paragraph;
    let is_tax = rng.random::<f64>() < if lean != 0.0 { 0.35 } else { 0.2 };
    let main = OTHER_TOPICS[rng.random_range(0..OTHER_TOPICS.len())];
    let side = OTHER_TOPICS[rng.random_range(0..OTHER_TOPICS.len())];
    let mut words = Vec::with_capacity(2 * units);
    for _ in 0..units {
        let u = rng.random::<f64>();
        let unit = if u < 0.2 {
            pick(rng, side)
        } else if !is_tax {
            pick(rng, main)
        } else if rng.random::<f64>() >= spec.lexicon_share {
            pick(rng, GENERAL_TAX)
        } else {
            let p_inc = if lean > 0.0 { spec.lean } else if lean < 0.0 { 1.0 - spec.lean } else { 0.5 };
            let pool = if rng.random::<f64>() < p_inc { INCREASE } else { DECREASE };
            pick(rng, pool)
        };
        words.push(unit);
        if rng.random::<f64>() < 0.4 {
            words.push(pick(rng, FILLER));
        }
    }
    let mut text = words.join(" ");
    text.push('.');
    text
}

pub fn generate_fixture(spec: &FixtureSpec) -> Result<Fixture> {
    if spec.n_quarters < 20 || spec.docs_per_quarter == 0 || spec.paragraphs_per_doc == 0 || spec.units_per_paragraph == 0 {
        return Err(Error::InvalidInput("fixture needs at least 20 quarters and nonempty documents".into()));
    }
    if !(0.0..=1.0).contains(&spec.lexicon_share) || !(0.5..=1.0).contains(&spec.lean) {
        return Err(Error::InvalidInput("need lexicon_share in [0, 1] and lean in [0.5, 1]".into()));
    }
    if !(spec.event_rate > 0.0 && spec.event_rate < 1.0) {
        return Err(Error::InvalidInput(format!("event_rate must lie in (0, 1), got {}", spec.event_rate)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n = spec.n_quarters;
    let normal = |rng: &mut ChaCha8Rng| -> f64 { StandardNormal.sample(rng) };

    let dt_exo: Vec<f64> = (0..n)
        .map(|_| {
            if rng.random::<f64>() < spec.event_rate {
                let size = 0.1 + 0.4 * rng.random::<f64>();
                if rng.random::<bool>() { size } else { -size }
            } else {
                0.0
            }
        })
        .collect();
    let dt_pv: Vec<f64> = dt_exo.iter().map(|&x| x + 0.05 * normal(&mut rng)).collect();
    // implementation-dated changes trail the present-value ones, with their
    // own noise so the two are not collinear in lags
    let dt_impl: Vec<f64> = (0..n)
        .map(|t| {
            let trail = 0.5 * (if t >= 1 { dt_pv[t - 1] } else { 0.0 } + if t >= 2 { dt_pv[t - 2] } else { 0.0 });
            trail + 0.05 * normal(&mut rng)
        })
        .collect();
    let mut gdp = Vec::with_capacity(n);
    let mut revenue = Vec::with_capacity(n);
    let (mut g, mut r, mut dg_prev) = (100.0, 50.0, 0.6);
    for t in 0..n {
        let upcoming = if t + 1 < n { dt_exo[t + 1] } else { 0.0 };
        let dg = 0.45 + 0.3 * dg_prev - 0.8 * upcoming - 0.5 * dt_exo[t] + 0.6 * normal(&mut rng);
        g += dg;
        r += 0.4 + 1.5 * dt_exo[t] + 0.1 * dg + 0.5 * normal(&mut rng);
        dg_prev = dg;
        gdp.push(g);
        revenue.push(r);
    }

    let mut documents = Vec::with_capacity(n * spec.docs_per_quarter);
    let mut q = spec.start;
    for t in 0..n {
        let lean = if t + 1 < n { dt_exo[t + 1] } else { 0.0 };
        for i in 0..spec.docs_per_quarter {
            let day = q.first_day() + chrono::Duration::days(10 + 30 * (i as i64 % 3));
            let text = (0..spec.paragraphs_per_doc)
                .map(|_| paragraph(&mut rng, spec, lean))
                .collect::<Vec<_>>()
                .join("\n\n");
            documents.push(RawDocument {
                id: format!("speech-{q}-{i}"),
                date: day,
                title: format!("Remarks {q} #{}", i + 1),
                text,
            });
        }
        q = q.next();
    }

    let mut series = TsFrame::with_length(spec.start, n);
    series.push("gdp", gdp, true)?;
    series.push("revenue", revenue, true)?;
    series.push("dt_pv", dt_pv, false)?;
    series.push("dt_impl", dt_impl, false)?;
    series.push("dt_exo", dt_exo, false)?;
    Ok(Fixture { documents, series })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shape_and_determinism() {
        let spec = FixtureSpec::default();
        let a = generate_fixture(&spec).unwrap();
        let b = generate_fixture(&spec).unwrap();
        assert_eq!(a.documents.len(), 200);
        assert_eq!(a.to_jsonl(), b.to_jsonl());
        assert_eq!(a.series.to_csv_string(), b.series.to_csv_string());
        assert_eq!(a.series.index[0].to_string(), "1983Q1");
        assert_eq!(a.series.index[99].to_string(), "2007Q4");
        let exo = a.series.column("dt_exo").unwrap();
        let share = exo.iter().filter(|&&x| x != 0.0).count() as f64 / exo.len() as f64;
        assert!((0.4..0.7).contains(&share), "event share {share}");
    }

    #[test]
    fn documents_fall_in_their_quarter() {
        let f = generate_fixture(&FixtureSpec { n_quarters: 24, ..Default::default() }).unwrap();
        for (i, d) in f.documents.iter().enumerate() {
            assert_eq!(crate::corpus::assign_quarter(d.date), f.series.index[i / 2]);
        }
    }
}
