//! Shipped data files and lookup of user-supplied replacements.
//!
//! Every data file has a compiled-in default. Setting `TEMPORA_DATA` points
//! the loader at a directory holding replacements with the same file names;
//! explicit paths override both.

use std::fs;
use std::path::{Path, PathBuf};

use crate::closeness::Lexicon;
use crate::constraint::FeasibilityTable;
use crate::error::{Error, Result};
use crate::lattice::{CueLexicon, RelationLattice};

pub const DATA_ENV: &str = "TEMPORA_DATA";

pub const LATTICE_FILE: &str = "lattice.txt";
pub const CUES_FILE: &str = "cues.txt";
pub const TABLE_FILE: &str = "table1.txt";
pub const LEXICON_FILE: &str = "lexicon.tsv";
pub const EXAMPLES_DIR: &str = "examples";

pub const DEFAULT_LATTICE: &str = include_str!("../data/lattice.txt");
pub const DEFAULT_CUES: &str = include_str!("../data/cues.txt");
pub const DEFAULT_TABLE: &str = include_str!("../data/table1.txt");
pub const DEFAULT_LEXICON: &str = include_str!("../data/lexicon.tsv");

macro_rules! examples {
    ($($name:literal),+ $(,)?) => {
        &[$(($name, include_str!(concat!("../data/examples/", $name)))),+]
    };
}

/// Worked example discourses, with their expectation directives.
pub const EXAMPLES: &[(&str, &str)] = examples!(
    "j1.disc",
    "j2.disc",
    "vvg_a.disc",
    "vvg_b.disc",
    "cl.disc",
    "cons1.disc",
    "jjk.disc",
    "jjk2.disc",
    "pp2_a.disc",
    "third.disc",
    "9a.disc",
    "9b.disc",
    "5a.disc",
    "alab_b.disc",
    "ruled.disc",
);

pub fn example(name: &str) -> Option<&'static str> {
    EXAMPLES.iter().find(|(n, _)| *n == name || n.strip_suffix(".disc") == Some(name)).map(|(_, t)| *t)
}

pub fn default_lattice() -> RelationLattice {
    RelationLattice::parse(DEFAULT_LATTICE).expect("shipped lattice is valid")
}

pub fn default_cues() -> CueLexicon {
    CueLexicon::parse(DEFAULT_CUES, &default_lattice()).expect("shipped cue lexicon is valid")
}

pub fn default_table() -> FeasibilityTable {
    FeasibilityTable::parse(DEFAULT_TABLE).expect("shipped table is valid")
}

pub fn default_lexicon() -> Lexicon {
    Lexicon::parse(DEFAULT_LEXICON).expect("shipped lexicon is valid").0
}

pub fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io { path: path.display().to_string(), message: e.to_string() })
}

/// Where each data file comes from.
#[derive(Debug, Clone, Default)]
pub struct DataPaths {
    pub dir: Option<PathBuf>,
    pub lattice: Option<PathBuf>,
    pub cues: Option<PathBuf>,
    pub table: Option<PathBuf>,
    pub lexicon: Option<PathBuf>,
}

impl DataPaths {
    /// Picks up `TEMPORA_DATA` when set.
    pub fn from_env() -> Self {
        DataPaths { dir: std::env::var_os(DATA_ENV).map(PathBuf::from), ..Default::default() }
    }

    fn resolve(&self, explicit: &Option<PathBuf>, file: &str, fallback: &'static str) -> Result<String> {
        if let Some(path) = explicit {
            return read_file(path);
        }
        if let Some(dir) = &self.dir {
            let path = dir.join(file);
            if path.exists() {
                return read_file(&path);
            }
        }
        Ok(fallback.to_string())
    }

    pub fn lattice_text(&self) -> Result<String> {
        self.resolve(&self.lattice, LATTICE_FILE, DEFAULT_LATTICE)
    }

    pub fn cues_text(&self) -> Result<String> {
        self.resolve(&self.cues, CUES_FILE, DEFAULT_CUES)
    }

    pub fn table_text(&self) -> Result<String> {
        self.resolve(&self.table, TABLE_FILE, DEFAULT_TABLE)
    }

    pub fn lexicon_text(&self) -> Result<String> {
        self.resolve(&self.lexicon, LEXICON_FILE, DEFAULT_LEXICON)
    }

    /// Example discourses: from `<dir>/examples/*.disc` when present,
    /// otherwise the shipped set. Sorted by file name.
    pub fn examples(&self) -> Result<Vec<(String, String)>> {
        if let Some(ex) = self.dir.as_ref().map(|d| d.join(EXAMPLES_DIR)).filter(|p| p.is_dir()) {
            return read_examples(&ex);
        }
        let mut out: Vec<_> = EXAMPLES.iter().map(|(n, t)| (n.to_string(), t.to_string())).collect();
        out.sort();
        Ok(out)
    }
}

/// Every `.disc` file in `dir`, sorted by file name.
pub fn read_examples(dir: &Path) -> Result<Vec<(String, String)>> {
    let entries = fs::read_dir(dir).map_err(|e| Error::Io { path: dir.display().to_string(), message: e.to_string() })?;
    let mut out = Vec::new();
    for entry in entries.flatten() {
        let path = entry.path();
        if path.extension().is_some_and(|e| e == "disc") {
            let name = path.file_name().unwrap_or_default().to_string_lossy().into_owned();
            out.push((name, read_file(&path)?));
        }
    }
    out.sort();
    Ok(out)
}

/// Loaded lattice, cue lexicon, feasibility table and closeness lexicon.
#[derive(Debug, Clone)]
pub struct DataSet {
    pub lattice: RelationLattice,
    pub cues: CueLexicon,
    pub table: FeasibilityTable,
    pub lexicon: Lexicon,
    pub warnings: Vec<String>,
}

impl DataSet {
    pub fn load(paths: &DataPaths) -> Result<Self> {
        let lattice = RelationLattice::parse(&paths.lattice_text()?)?;
        let cues = CueLexicon::parse(&paths.cues_text()?, &lattice)?;
        let table = FeasibilityTable::parse(&paths.table_text()?)?;
        let (lexicon, warnings) = Lexicon::parse(&paths.lexicon_text()?)?;
        Ok(DataSet { lattice, cues, table, lexicon, warnings })
    }
}

impl Default for DataSet {
    fn default() -> Self {
        DataSet {
            lattice: default_lattice(),
            cues: default_cues(),
            table: default_table(),
            lexicon: default_lexicon(),
            warnings: Vec::new(),
        }
    }
}
