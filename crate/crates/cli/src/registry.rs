//! Dataset registry, cache directory and fetch/normalise step.
//!
//! Named datasets resolve to `<cache>/<name>.txt`, a canonical
//! whitespace-separated `source target sign` edge list. Fetching downloads
//! (or copies) the raw file, checks its data-line count, drops self-loops and
//! repeated pairs, and writes the canonical file once.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use flate2::read::GzDecoder;
use signtypes::graph::{load_edge_list, load_edge_list_with, LoadOptions};
use signtypes::SignedDigraph;

pub const CACHE_ENV: &str = "SIGNTYPES_CACHE";
pub const CONFIG_ENV: &str = "SIGNTYPES_CONFIG";

#[derive(Clone, Debug, Default, PartialEq)]
pub struct DatasetEntry {
    pub name: String,
    /// Remote source; plain or gzip-compressed edge list.
    pub url: Option<String>,
    /// Local raw source, used instead of `url` when set.
    pub path: Option<PathBuf>,
    /// Expected number of data lines in the raw source.
    pub edges: Option<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Registry {
    pub cache_dir: PathBuf,
    pub datasets: BTreeMap<String, DatasetEntry>,
}

fn builtin() -> BTreeMap<String, DatasetEntry> {
    let mut m = BTreeMap::new();
    let mut add = |name: &str, url: Option<&str>, edges: usize| {
        m.insert(
            name.to_owned(),
            DatasetEntry {
                name: name.to_owned(),
                url: url.map(str::to_owned),
                path: None,
                edges: Some(edges),
            },
        );
    };
    add(
        "epinions",
        Some("https://snap.stanford.edu/data/soc-sign-epinions.txt.gz"),
        841_372,
    );
    add(
        "slashdot",
        Some("https://snap.stanford.edu/data/soc-sign-Slashdot090221.txt.gz"),
        549_202,
    );
    // Only the raw election dump is published; a converted edge list has to
    // be supplied via `dataset.wikipedia.path` or placed in the cache.
    add("wikipedia", None, 103_747);
    m
}

fn default_cache_dir() -> PathBuf {
    if let Some(home) = std::env::var_os("HOME") {
        PathBuf::from(home).join(".cache").join("signtypes")
    } else {
        PathBuf::from(".signtypes-cache")
    }
}

impl Registry {
    /// Built-in entries, then the config file, then the cache environment
    /// variable, then an explicit `--cache-dir`.
    pub fn load(config: Option<&Path>, cache_dir: Option<&Path>) -> Result<Registry> {
        let mut reg = Registry {
            cache_dir: default_cache_dir(),
            datasets: builtin(),
        };
        let config = config
            .map(Path::to_path_buf)
            .or_else(|| std::env::var_os(CONFIG_ENV).map(PathBuf::from));
        if let Some(path) = config {
            let text = fs::read_to_string(&path).with_context(|| format!("reading config {}", path.display()))?;
            reg.apply_config(&text)
                .with_context(|| format!("in config {}", path.display()))?;
        }
        if let Some(dir) = std::env::var_os(CACHE_ENV) {
            reg.cache_dir = PathBuf::from(dir);
        }
        if let Some(dir) = cache_dir {
            reg.cache_dir = dir.to_path_buf();
        }
        Ok(reg)
    }

    /// `key = value` lines; `#` starts a comment. Keys are `cache_dir` and
    /// `dataset.<name>.{url,path,edges}`.
    pub fn apply_config(&mut self, text: &str) -> Result<()> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("line {}: expected key = value", i + 1))?;
            let (key, value) = (key.trim(), value.trim());
            if key == "cache_dir" {
                self.cache_dir = PathBuf::from(value);
                continue;
            }
            let rest = key
                .strip_prefix("dataset.")
                .ok_or_else(|| anyhow!("line {}: unknown key {key:?}", i + 1))?;
            let (name, field) = rest
                .rsplit_once('.')
                .ok_or_else(|| anyhow!("line {}: expected dataset.<name>.<field>", i + 1))?;
            let entry = self.datasets.entry(name.to_owned()).or_insert_with(|| DatasetEntry {
                name: name.to_owned(),
                ..Default::default()
            });
            match field {
                "url" => entry.url = Some(value.to_owned()),
                "path" => entry.path = Some(PathBuf::from(value)),
                "edges" => {
                    entry.edges = Some(
                        value
                            .parse()
                            .map_err(|_| anyhow!("line {}: invalid edge count {value:?}", i + 1))?,
                    )
                }
                other => bail!("line {}: unknown dataset field {other:?}", i + 1),
            }
        }
        Ok(())
    }

    pub fn entry(&self, name: &str) -> Result<&DatasetEntry> {
        self.datasets.get(&name.to_ascii_lowercase()).ok_or_else(|| {
            let known: Vec<&str> = self.datasets.keys().map(String::as_str).collect();
            anyhow!("unknown dataset {name:?}; known: {}", known.join(", "))
        })
    }

    pub fn cached_path(&self, name: &str) -> PathBuf {
        self.cache_dir.join(format!("{}.txt", name.to_ascii_lowercase()))
    }

    /// Path of the canonical file, fetching it first if absent.
    pub fn ensure(&self, name: &str) -> Result<PathBuf> {
        let entry = self.entry(name)?;
        let target = self.cached_path(&entry.name);
        if target.exists() {
            return Ok(target);
        }
        let raw: Box<dyn Read> = if let Some(path) = &entry.path {
            Box::new(File::open(path).with_context(|| format!("opening {}", path.display()))?)
        } else if let Some(url) = &entry.url {
            download(url)?
        } else {
            bail!(
                "dataset {:?} has no source; place a converted edge list at {} or set dataset.{}.path in the config",
                entry.name,
                target.display(),
                entry.name
            );
        };
        let source = entry.path.as_ref().map(|p| p.display().to_string()).or(entry.url.clone()).unwrap_or_default();
        let raw = maybe_gunzip(raw, &source)?;
        fs::create_dir_all(&self.cache_dir)
            .with_context(|| format!("creating cache dir {}", self.cache_dir.display()))?;
        normalize(raw, entry.edges, &target)?;
        Ok(target)
    }

    pub fn load_graph(&self, name: &str) -> Result<SignedDigraph> {
        let path = self.ensure(name)?;
        read_graph(&path)
    }
}

pub fn read_graph(path: &Path) -> Result<SignedDigraph> {
    let f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    load_edge_list(BufReader::new(f)).with_context(|| format!("parsing {}", path.display()))
}

fn download(url: &str) -> Result<Box<dyn Read>> {
    let resp = ureq::get(url).call().with_context(|| format!("downloading {url}"))?;
    let mut buf = Vec::new();
    resp.into_body()
        .into_reader()
        .read_to_end(&mut buf)
        .with_context(|| format!("reading {url}"))?;
    Ok(Box::new(std::io::Cursor::new(buf)))
}

fn maybe_gunzip(raw: Box<dyn Read>, source: &str) -> Result<Box<dyn BufRead>> {
    let mut reader = BufReader::new(raw);
    let magic = reader.fill_buf()?;
    let gz = magic.len() >= 2 && magic[0] == 0x1f && magic[1] == 0x8b;
    if gz || source.ends_with(".gz") {
        Ok(Box::new(BufReader::new(GzDecoder::new(reader))))
    } else {
        Ok(Box::new(reader))
    }
}

/// Parse a raw edge list, check its size, and write the canonical file via
/// a temporary sibling so an interrupted fetch leaves no partial cache.
fn normalize(raw: Box<dyn BufRead>, expected: Option<usize>, target: &Path) -> Result<()> {
    let opts = LoadOptions {
        allow_hidden: false,
        skip_self_loops: true,
        skip_duplicates: true,
    };
    let (g, summary) = load_edge_list_with(raw, &opts).context("parsing raw dataset")?;
    if let Some(n) = expected {
        if summary.data_lines != n {
            bail!("raw dataset has {} edge lines, expected {n}", summary.data_lines);
        }
    }
    let tmp = target.with_extension("txt.partial");
    {
        let mut w = BufWriter::new(File::create(&tmp)?);
        writeln!(
            w,
            "# nodes={} edges={} raw_lines={} dropped_self_loops={} dropped_duplicates={}",
            g.node_count(),
            g.edge_count(),
            summary.data_lines,
            summary.skipped_self_loops,
            summary.skipped_duplicates
        )?;
        g.write_edge_list(&mut w)?;
        w.flush()?;
    }
    fs::rename(&tmp, target)?;
    eprintln!(
        "wrote {} ({} edges; dropped {} self-loops, {} duplicates)",
        target.display(),
        g.edge_count(),
        summary.skipped_self_loops,
        summary.skipped_duplicates
    );
    Ok(())
}
