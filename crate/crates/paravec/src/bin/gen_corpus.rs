//! Deterministic generator for the bundled benchmark corpus.
//!
//! Emits one document per line in the corpus TSV format
//! (`title<TAB>category<TAB>text`). Each document draws most of its tokens
//! from its category's theme lexicon (Zipf-weighted), mixed with common
//! English words and a small amount of cross-category noise, so that the
//! categories overlap the way real encyclopedia topics do.

use std::io::Write;
use std::path::PathBuf;

use clap::Parser;
use rand::prelude::*;
use rand_chacha::ChaCha12Rng;

#[derive(Parser)]
#[command(about = "Generate the benchmark corpus", version)]
struct Options {
    /// Output TSV path
    out: PathBuf,

    /// Number of documents
    #[arg(long, default_value_t = 2000)]
    docs: usize,

    /// Generator seed
    #[arg(long, default_value_t = 20140622)]
    seed: u64,
}

const CATEGORIES: &[(&str, &[&str])] = &[
    ("astronomy", &[
        "star", "planet", "orbit", "galaxy", "comet", "nebula", "telescope", "lunar", "solar",
        "eclipse", "asteroid", "meteor", "cosmic", "universe", "gravity", "moon", "mars",
        "jupiter", "saturn", "venus", "mercury", "neptune", "constellation", "supernova",
        "quasar", "pulsar", "horizon", "redshift", "parallax", "magnitude", "luminosity",
        "dwarf", "giant", "binary", "cluster", "astronomer", "observatory", "spectrum",
        "radiation", "interstellar", "celestial", "zenith", "equinox", "solstice", "aurora",
        "crater", "axis", "rotation", "revolution", "probe", "satellite", "rocket", "launch",
        "mission", "cosmos", "stellar", "photon", "infrared", "ultraviolet", "wavelength",
        "spacecraft", "astronaut", "capsule", "payload", "trajectory", "apogee", "perigee",
        "exoplanet", "transit", "flare", "sunspot", "corona", "meteorite", "ecliptic", "epoch",
    ]),
    ("biology", &[
        "cell", "enzyme", "protein", "gene", "dna", "rna", "membrane", "nucleus",
        "mitochondria", "chloroplast", "organism", "species", "evolution", "mutation",
        "chromosome", "ribosome", "bacteria", "virus", "fungus", "algae", "photosynthesis",
        "respiration", "metabolism", "hormone", "neuron", "synapse", "antibody", "antigen",
        "immune", "tissue", "organ", "skeleton", "muscle", "digestion", "circulation",
        "heart", "lung", "liver", "kidney", "brain", "nerve", "receptor", "ligand",
        "substrate", "amino", "acid", "lipid", "carbohydrate", "glucose", "insulin",
        "ecology", "habitat", "predator", "prey", "symbiosis", "parasite", "host",
        "taxonomy", "genus", "phylum", "kingdom", "biome", "genome", "phenotype", "genotype",
        "allele", "heredity", "offspring", "embryo", "larva", "gland", "vesicle",
        "cytoplasm", "organelle",
    ]),
    ("chemistry", &[
        "atom", "molecule", "electron", "proton", "neutron", "ion", "isotope", "element",
        "compound", "reaction", "catalyst", "alkali", "solvent", "solution", "solute",
        "precipitate", "titration", "oxidation", "reduction", "combustion", "polymer",
        "monomer", "crystal", "lattice", "bond", "covalent", "ionic", "metallic", "valence",
        "orbital", "periodic", "halogen", "hydrogen", "oxygen", "nitrogen", "carbon",
        "sulfur", "phosphorus", "chlorine", "sodium", "potassium", "calcium", "iron",
        "copper", "zinc", "gold", "silver", "lead", "helium", "neon", "argon", "lithium",
        "magnesium", "aluminium", "silicon", "benzene", "ethanol", "methane", "ammonia",
        "distillation", "evaporation", "condensation", "sublimation", "equilibrium",
        "entropy", "enthalpy", "exothermic", "endothermic", "molarity", "mole", "litmus",
        "indicator", "buffer", "reagent",
    ]),
    ("computing", &[
        "algorithm", "compiler", "software", "hardware", "kernel", "processor", "memory",
        "cache", "register", "network", "server", "client", "protocol", "packet", "router",
        "database", "query", "index", "table", "schema", "transaction", "thread", "process",
        "mutex", "semaphore", "deadlock", "heap", "stack", "queue", "array", "pointer",
        "recursion", "iteration", "loop", "function", "variable", "constant", "integer",
        "float", "string", "boolean", "syntax", "parser", "lexer", "token", "bytecode",
        "interpreter", "runtime", "debugger", "breakpoint", "profiler", "latency",
        "throughput", "bandwidth", "encryption", "cipher", "hash", "checksum", "firewall",
        "browser", "internet", "website", "javascript", "python", "linux", "terminal",
        "shell", "script", "repository", "commit", "branch", "merge", "patch", "release",
        "version",
    ]),
    ("cooking", &[
        "recipe", "flour", "sugar", "butter", "salt", "pepper", "onion", "garlic", "tomato",
        "basil", "oregano", "thyme", "rosemary", "parsley", "ginger", "cinnamon", "nutmeg",
        "vanilla", "chocolate", "caramel", "dough", "batter", "yeast", "bake", "roast",
        "grill", "simmer", "boil", "steam", "fry", "whisk", "knead", "marinate", "season",
        "garnish", "sauce", "broth", "stock", "soup", "stew", "salad", "pasta", "noodle",
        "rice", "bread", "cake", "cookie", "pie", "tart", "pastry", "cream", "cheese",
        "yogurt", "milk", "egg", "chicken", "beef", "pork", "lamb", "shrimp", "mushroom",
        "carrot", "celery", "potato", "spinach", "lettuce", "cucumber", "vinegar", "olive",
        "lemon", "lime", "apple", "banana", "berry", "oven", "skillet", "spatula", "kitchen",
        "chef", "cuisine", "appetizer", "dessert", "flavor", "aroma", "savory", "spicy",
    ]),
    ("economics", &[
        "market", "price", "demand", "supply", "inflation", "deflation", "recession",
        "growth", "capital", "labor", "wage", "salary", "profit", "revenue", "cost",
        "budget", "deficit", "surplus", "debt", "credit", "loan", "interest", "mortgage",
        "bank", "currency", "exchange", "trade", "tariff", "export", "import", "investment",
        "dividend", "portfolio", "asset", "liability", "equity", "inventory", "consumer",
        "producer", "monopoly", "competition", "regulation", "subsidy", "tax", "fiscal",
        "monetary", "policy", "economy", "industry", "sector", "commodity", "futures",
        "hedge", "arbitrage", "liquidity", "solvency", "bankruptcy", "merger",
        "acquisition", "entrepreneur", "startup", "venture", "shareholder", "audit",
        "ledger", "accounting", "payroll", "pension", "insurance", "premium", "quota",
        "embargo", "globalization",
    ]),
    ("geology", &[
        "rock", "mineral", "quartz", "granite", "basalt", "limestone", "sandstone", "shale",
        "marble", "slate", "sediment", "erosion", "weathering", "volcano", "lava", "magma",
        "eruption", "earthquake", "fault", "tremor", "seismic", "tectonic", "plate", "crust",
        "mantle", "fossil", "stratum", "era", "glacier", "moraine", "iceberg", "permafrost",
        "canyon", "valley", "plateau", "mesa", "ridge", "summit", "peak", "cliff", "cave",
        "stalactite", "stalagmite", "geyser", "spring", "aquifer", "groundwater", "delta",
        "estuary", "floodplain", "alluvial", "bedrock", "ore", "vein", "mine", "quarry",
        "drill", "bore", "prospect", "geologist", "survey", "topography", "elevation",
        "contour", "landslide", "avalanche", "subsidence", "uplift", "fold", "anticline",
        "syncline", "metamorphic", "igneous", "sedimentary",
    ]),
    ("history", &[
        "empire", "dynasty", "monarch", "king", "queen", "emperor", "pharaoh", "senate",
        "republic", "war", "battle", "siege", "conquest", "treaty", "armistice", "alliance",
        "colony", "independence", "constitution", "parliament", "feudal", "knight", "castle",
        "fortress", "cathedral", "monastery", "crusade", "pilgrimage", "plague", "famine",
        "renaissance", "reformation", "enlightenment", "medieval", "ancient", "antiquity",
        "archaeology", "artifact", "relic", "manuscript", "scroll", "chronicle", "archive",
        "museum", "historian", "civilization", "culture", "tradition", "heritage", "legacy",
        "ancestor", "descendant", "genealogy", "tribe", "clan", "nomad", "settlement",
        "migration", "exodus", "slavery", "abolition", "suffrage", "reform", "rebellion",
        "uprising", "coup", "regime", "propaganda", "diplomacy", "ambassador", "envoy",
        "frontier", "territory", "province",
    ]),
    ("literature", &[
        "novel", "poem", "poetry", "prose", "verse", "stanza", "rhyme", "metaphor", "simile",
        "allegory", "irony", "satire", "parody", "tragedy", "comedy", "drama", "playwright",
        "author", "novelist", "poet", "editor", "publisher", "chapter", "paragraph",
        "sentence", "narrative", "plot", "character", "protagonist", "antagonist",
        "dialogue", "monologue", "soliloquy", "prologue", "epilogue", "foreword", "preface",
        "anthology", "trilogy", "sequel", "prequel", "fiction", "nonfiction", "biography",
        "autobiography", "memoir", "essay", "critique", "genre", "romance", "mystery",
        "thriller", "fantasy", "fable", "myth", "legend", "folklore", "ballad", "sonnet",
        "haiku", "epic", "ode", "elegy", "limerick", "alliteration", "assonance",
        "symbolism", "imagery", "motif", "foreshadowing", "flashback", "climax",
        "denouement", "canon",
    ]),
    ("medicine", &[
        "doctor", "nurse", "patient", "hospital", "clinic", "surgery", "surgeon",
        "anesthesia", "diagnosis", "prognosis", "symptom", "syndrome", "disease", "illness",
        "infection", "inflammation", "fever", "cough", "headache", "migraine", "fracture",
        "wound", "bandage", "suture", "scalpel", "stethoscope", "thermometer", "vaccine",
        "immunization", "antibiotic", "antiviral", "medication", "prescription", "dosage",
        "pharmacy", "pharmacist", "therapy", "rehabilitation", "physiotherapy", "cardiology",
        "neurology", "oncology", "pediatrics", "psychiatry", "radiology", "dermatology",
        "orthopedics", "anatomy", "physiology", "pathology", "biopsy", "tumor", "cancer",
        "diabetes", "asthma", "allergy", "arthritis", "hypertension", "stroke", "seizure",
        "trauma", "triage", "ambulance", "paramedic", "emergency", "ward", "intake",
        "discharge", "checkup", "screening", "dose", "clinical", "remission",
    ]),
    ("music", &[
        "melody", "harmony", "rhythm", "tempo", "chord", "scale", "note", "pitch", "octave",
        "interval", "key", "major", "minor", "sharp", "flat", "clef", "treble", "bass",
        "staff", "notation", "composer", "conductor", "orchestra", "symphony", "concerto",
        "sonata", "opera", "aria", "choir", "chorus", "soprano", "alto", "tenor", "baritone",
        "piano", "violin", "viola", "cello", "guitar", "drum", "trumpet", "trombone",
        "flute", "clarinet", "oboe", "bassoon", "saxophone", "harp", "organ", "accordion",
        "banjo", "mandolin", "ukulele", "percussion", "strings", "brass", "woodwind",
        "ensemble", "quartet", "quintet", "solo", "duet", "recital", "concert", "audience",
        "encore", "crescendo", "forte", "allegro", "adagio", "legato", "staccato",
        "vibrato", "lyric", "songwriter", "album", "studio",
    ]),
    ("sports", &[
        "athlete", "coach", "referee", "umpire", "stadium", "arena", "league", "tournament",
        "championship", "trophy", "medal", "podium", "victory", "defeat", "score", "goal",
        "penalty", "foul", "offside", "kickoff", "halftime", "overtime", "marathon",
        "sprint", "relay", "hurdle", "javelin", "discus", "vault", "triathlon", "decathlon",
        "swimming", "diving", "rowing", "sailing", "cycling", "skiing", "skating", "hockey",
        "soccer", "football", "basketball", "baseball", "softball", "volleyball", "tennis",
        "badminton", "squash", "golf", "cricket", "rugby", "boxing", "wrestling", "judo",
        "karate", "fencing", "archery", "gymnastics", "dribble", "tackle", "catch", "bat",
        "racket", "net", "court", "field", "track", "lane", "whistle", "jersey", "playoff",
        "roster", "lineup", "captain", "defender", "striker", "goalkeeper", "quarterback",
    ]),
];

const COMMON: &[&str] = &[
    "the", "a", "an", "of", "in", "on", "at", "to", "from", "with", "without", "and", "or",
    "but", "not", "is", "are", "was", "were", "be", "been", "being", "have", "has", "had",
    "do", "does", "did", "will", "would", "can", "could", "may", "might", "must", "this",
    "that", "these", "those", "it", "its", "they", "them", "their", "we", "our", "you",
    "your", "as", "by", "for", "if", "then", "than", "when", "where", "which", "who",
    "whose", "what", "why", "how", "all", "any", "both", "each", "few", "more", "most",
    "other", "some", "such", "no", "nor", "only", "own", "same", "so", "too", "very",
    "just", "also", "now", "here", "there", "about", "above", "below", "between", "into",
    "through", "during", "before", "after", "again", "because", "while", "over", "under",
    "against", "among", "within", "along", "across", "behind", "beyond", "near", "new",
    "old", "first", "last", "long", "short", "great", "small", "large", "early", "late",
    "young", "high", "low", "many", "much", "several", "often", "never", "always",
    "sometimes", "usually", "study", "result", "method", "system", "form", "part", "group",
    "number", "example", "case", "point", "fact", "idea", "work", "world", "year", "time",
    "day", "way", "thing", "place", "area", "research", "analysis", "theory", "model",
    "data", "value", "level", "rate", "change", "development", "use", "used", "using",
    "based", "known", "called", "found", "given", "shown", "described", "noted", "common",
    "general", "special", "important", "significant", "various", "different", "similar",
    "certain", "possible", "likely", "typical", "standard", "primary", "secondary",
    "final", "total", "average",
];

/// Zipf-weighted sampler over a word list.
struct Lexicon {
    words: &'static [&'static str],
    cdf: Vec<f64>,
}

impl Lexicon {
    fn new(words: &'static [&'static str], exponent: f64) -> Self {
        let mut cdf = Vec::with_capacity(words.len());
        let mut total = 0.0;
        for i in 0..words.len() {
            total += 1.0 / (i as f64 + 1.0).powf(exponent);
            cdf.push(total);
        }
        Lexicon { words, cdf }
    }

    fn sample(&self, rng: &mut ChaCha12Rng) -> &'static str {
        let u = rng.gen::<f64>() * self.cdf.last().unwrap();
        let i = self.cdf.partition_point(|&c| c < u);
        self.words[i.min(self.words.len() - 1)]
    }
}

fn main() -> std::io::Result<()> {
    let options = Options::parse();
    let mut rng = ChaCha12Rng::seed_from_u64(options.seed);

    let themes: Vec<Lexicon> = CATEGORIES
        .iter()
        .map(|(_, words)| Lexicon::new(words, 0.7))
        .collect();
    let common = Lexicon::new(COMMON, 1.0);

    // uneven category sizes, like real category systems
    let weights: Vec<f64> = (0..CATEGORIES.len())
        .map(|i| 1.0 + 0.08 * i as f64)
        .collect();
    let weight_total: f64 = weights.iter().sum();

    let mut out = std::io::BufWriter::new(std::fs::File::create(&options.out)?);
    let mut per_category = vec![0usize; CATEGORIES.len()];
    for _ in 0..options.docs {
        let mut u = rng.gen::<f64>() * weight_total;
        let mut cat = CATEGORIES.len() - 1;
        for (i, &w) in weights.iter().enumerate() {
            if u < w {
                cat = i;
                break;
            }
            u -= w;
        }

        let len = rng.gen_range(40..=110);
        let mut tokens = Vec::with_capacity(len);
        for _ in 0..len {
            let r = rng.gen::<f64>();
            let word = if r < 0.45 {
                common.sample(&mut rng)
            } else if r < 0.70 {
                // cross-category noise
                let other = rng.gen_range(0..CATEGORIES.len());
                themes[other].sample(&mut rng)
            } else {
                themes[cat].sample(&mut rng)
            };
            tokens.push(word);
        }

        let (name, _) = CATEGORIES[cat];
        per_category[cat] += 1;
        let mut title: String = name
            .chars()
            .take(1)
            .flat_map(char::to_uppercase)
            .collect();
        title.push_str(&name[1..]);
        writeln!(
            out,
            "{} {:04}\t{}\t{}",
            title,
            per_category[cat],
            name,
            tokens.join(" ")
        )?;
    }

    eprintln!(
        "wrote {} documents over {} categories to {}",
        options.docs,
        CATEGORIES.len(),
        options.out.display()
    );
    Ok(())
}
