//! Tokenization, vocabularies, id-encoded corpora and seeded document
//! sampling.
use std::collections::{BTreeSet, HashMap, HashSet};
use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::seed;

pub const CORPUS_FILE_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenizerConfig {
    pub min_token_length: usize,
    pub min_corpus_frequency: usize,
    pub stoplist: HashSet<String>,
}

impl Default for TokenizerConfig {
    fn default() -> Self {
        Self {
            min_token_length: 2,
            min_corpus_frequency: 2,
            stoplist: HashSet::new(),
        }
    }
}

impl TokenizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.min_token_length < 1 {
            return Err(Error::InvalidConfig("min_token_length must be >= 1".into()));
        }
        if self.min_corpus_frequency < 1 {
            return Err(Error::InvalidConfig(
                "min_corpus_frequency must be >= 1".into(),
            ));
        }
        Ok(())
    }

    /// Reads a stoplist with one word per line; blank lines and lines
    /// starting with `#` are ignored.
    pub fn load_stoplist(path: &Path) -> Result<HashSet<String>> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(str::to_lowercase)
            .collect())
    }
}

/// Dense word/id mapping. Ids are `0..len()`.
#[derive(Debug, Clone, Default)]
pub struct Vocabulary {
    words: Vec<String>,
    index: HashMap<String, u32>,
}

impl PartialEq for Vocabulary {
    fn eq(&self, other: &Self) -> bool {
        self.words == other.words
    }
}

impl Eq for Vocabulary {}

impl Vocabulary {
    /// Fails if `words` contains a duplicate.
    pub fn from_words(words: Vec<String>) -> Result<Self> {
        let mut index = HashMap::with_capacity(words.len());
        for (i, w) in words.iter().enumerate() {
            if index.insert(w.clone(), i as u32).is_some() {
                return Err(Error::format("vocabulary", format!("duplicate word {w:?}")));
            }
        }
        Ok(Self { words, index })
    }

    fn push(&mut self, word: &str) -> u32 {
        if let Some(&id) = self.index.get(word) {
            return id;
        }
        let id = self.words.len() as u32;
        self.words.push(word.to_string());
        self.index.insert(word.to_string(), id);
        id
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn id(&self, word: &str) -> Option<u32> {
        self.index.get(word).copied()
    }

    pub fn word(&self, id: u32) -> Option<&str> {
        self.words.get(id as usize).map(String::as_str)
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    #[serde(rename = "id")]
    pub doc_id: String,
    pub tokens: Vec<u32>,
}

/// Counts reported by [`build_corpus_with_diagnostics`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BuildDiagnostics {
    pub dropped_documents: usize,
    pub dropped_word_types: usize,
    pub dropped_tokens: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corpus {
    vocabulary: Vocabulary,
    documents: Vec<Document>,
    fingerprint: String,
    // Frequency filter re-applied when this corpus is subsampled.
    min_corpus_frequency: usize,
}

impl Corpus {
    /// Assembles a corpus from already encoded parts, checking the
    /// structural invariants.
    pub fn from_parts(
        vocabulary: Vocabulary,
        documents: Vec<Document>,
        min_corpus_frequency: usize,
    ) -> Result<Self> {
        if documents.is_empty() {
            return Err(Error::EmptyCorpus);
        }
        let v = vocabulary.len() as u32;
        let mut seen = HashSet::with_capacity(documents.len());
        for doc in &documents {
            if !seen.insert(doc.doc_id.as_str()) {
                return Err(Error::DuplicateDocId(doc.doc_id.clone()));
            }
            if doc.tokens.is_empty() {
                return Err(Error::format(
                    format!("document {}", doc.doc_id),
                    "document has no tokens",
                ));
            }
            if let Some(&bad) = doc.tokens.iter().find(|&&t| t >= v) {
                return Err(Error::format(
                    format!("document {}", doc.doc_id),
                    format!("token id {bad} >= V={v}"),
                ));
            }
        }
        let fingerprint = fingerprint(&vocabulary, &documents);
        Ok(Self {
            vocabulary,
            documents,
            fingerprint,
            min_corpus_frequency: min_corpus_frequency.max(1),
        })
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocabulary
    }

    pub fn documents(&self) -> &[Document] {
        &self.documents
    }

    pub fn fingerprint(&self) -> &str {
        &self.fingerprint
    }

    pub fn min_corpus_frequency(&self) -> usize {
        self.min_corpus_frequency
    }

    pub fn num_docs(&self) -> usize {
        self.documents.len()
    }

    pub fn num_tokens(&self) -> usize {
        self.documents.iter().map(|d| d.tokens.len()).sum()
    }

    pub fn document(&self, doc_id: &str) -> Option<&Document> {
        self.documents.iter().find(|d| d.doc_id == doc_id)
    }

    /// Words of a document, in token order.
    pub fn words_of<'a>(&'a self, doc: &'a Document) -> impl Iterator<Item = &'a str> + 'a {
        doc.tokens
            .iter()
            .map(move |&t| self.vocabulary.words[t as usize].as_str())
    }
}

fn fingerprint(vocabulary: &Vocabulary, documents: &[Document]) -> String {
    let mut h = Sha256::new();
    h.update(b"topicstab-corpus-v1\n");
    h.update((vocabulary.len() as u64).to_le_bytes());
    for w in vocabulary.words() {
        h.update((w.len() as u64).to_le_bytes());
        h.update(w.as_bytes());
    }
    h.update((documents.len() as u64).to_le_bytes());
    for d in documents {
        h.update((d.doc_id.len() as u64).to_le_bytes());
        h.update(d.doc_id.as_bytes());
        h.update((d.tokens.len() as u64).to_le_bytes());
        for t in &d.tokens {
            h.update(t.to_le_bytes());
        }
    }
    hex::encode(h.finalize())
}

/// Lowercases, splits on every non-alphabetic character, and drops short
/// and stoplisted tokens.
pub fn tokenize(raw_text: &str, config: &TokenizerConfig) -> Vec<String> {
    raw_text
        .split(|c: char| !c.is_alphabetic())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
        .filter(|t| t.chars().count() >= config.min_token_length)
        .filter(|t| !config.stoplist.contains(t))
        .collect()
}

pub fn build_corpus<I, S, T>(raw_docs: I, config: &TokenizerConfig) -> Result<Corpus>
where
    I: IntoIterator<Item = (S, T)>,
    S: Into<String>,
    T: AsRef<str>,
{
    build_corpus_with_diagnostics(raw_docs, config).map(|(c, _)| c)
}

pub fn build_corpus_with_diagnostics<I, S, T>(
    raw_docs: I,
    config: &TokenizerConfig,
) -> Result<(Corpus, BuildDiagnostics)>
where
    I: IntoIterator<Item = (S, T)>,
    S: Into<String>,
    T: AsRef<str>,
{
    config.validate()?;
    let mut seen = HashSet::new();
    let mut tokenized = Vec::new();
    for (id, text) in raw_docs {
        let id: String = id.into();
        if !seen.insert(id.clone()) {
            return Err(Error::DuplicateDocId(id));
        }
        tokenized.push((id, tokenize(text.as_ref(), config)));
    }
    encode(tokenized, config.min_corpus_frequency)
}

/// Frequency-filters word-level documents and assigns ids in first
/// occurrence order.
fn encode<S: AsRef<str>>(
    docs: Vec<(String, Vec<S>)>,
    min_corpus_frequency: usize,
) -> Result<(Corpus, BuildDiagnostics)> {
    let mut counts: HashMap<&str, usize> = HashMap::new();
    for (_, toks) in &docs {
        for t in toks {
            *counts.entry(t.as_ref()).or_insert(0) += 1;
        }
    }
    let mut diag = BuildDiagnostics {
        dropped_word_types: counts
            .values()
            .filter(|&&c| c < min_corpus_frequency)
            .count(),
        ..Default::default()
    };

    let mut vocabulary = Vocabulary::default();
    let mut documents = Vec::with_capacity(docs.len());
    for (id, toks) in &docs {
        let mut ids = Vec::with_capacity(toks.len());
        for t in toks {
            let t = t.as_ref();
            if counts[t] >= min_corpus_frequency {
                ids.push(vocabulary.push(t));
            } else {
                diag.dropped_tokens += 1;
            }
        }
        if ids.is_empty() {
            diag.dropped_documents += 1;
        } else {
            documents.push(Document {
                doc_id: id.clone(),
                tokens: ids,
            });
        }
    }
    if documents.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let corpus = Corpus::from_parts(vocabulary, documents, min_corpus_frequency)?;
    Ok((corpus, diag))
}

/// Draws `n` documents uniformly without replacement and rebuilds the
/// vocabulary from the selection, re-applying the source corpus's
/// frequency filter. Selected documents appear in draw order.
pub fn sample_corpus(corpus: &Corpus, n: usize, seed: u64) -> Result<Corpus> {
    sample_corpus_with_diagnostics(corpus, n, seed).map(|(c, _)| c)
}

pub fn sample_corpus_with_diagnostics(
    corpus: &Corpus,
    n: usize,
    seed: u64,
) -> Result<(Corpus, BuildDiagnostics)> {
    let max = corpus.num_docs();
    if n < 1 || n > max {
        return Err(Error::SampleSizeOutOfRange { n, max });
    }
    let mut rng = seed::rng(seed);
    let picked = rand::seq::index::sample(&mut rng, max, n);
    let docs: Vec<(String, Vec<&str>)> = picked
        .iter()
        .map(|i| {
            let d = &corpus.documents[i];
            (d.doc_id.clone(), corpus.words_of(d).collect())
        })
        .collect();
    encode(docs, corpus.min_corpus_frequency)
}

/// Reads raw documents from a directory of UTF-8 text files (doc id = file
/// name, sorted) or from a JSON-lines file of `{"id", "text"}` objects.
pub fn read_raw_documents(path: &Path) -> Result<Vec<(String, String)>> {
    if path.is_dir() {
        let mut entries: Vec<_> = fs::read_dir(path)
            .map_err(|e| Error::io(path, e))?
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::io(path, e))?;
        entries.sort_by_key(|e| e.file_name());
        let mut out = Vec::new();
        for e in entries {
            let p = e.path();
            if !p.is_file() {
                continue;
            }
            let text = fs::read_to_string(&p).map_err(|err| Error::io(&p, err))?;
            out.push((e.file_name().to_string_lossy().into_owned(), text));
        }
        Ok(out)
    } else {
        #[derive(Deserialize)]
        struct RawLine {
            id: String,
            text: String,
        }
        let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
        let mut out = Vec::new();
        for (lineno, line) in BufReader::new(file).lines().enumerate() {
            let line = line.map_err(|e| Error::io(path, e))?;
            if line.trim().is_empty() {
                continue;
            }
            let raw: RawLine = serde_json::from_str(&line)
                .map_err(|e| Error::format(format!("line {}", lineno + 1), e.to_string()))?;
            out.push((raw.id, raw.text));
        }
        Ok(out)
    }
}

#[derive(Serialize, Deserialize)]
struct CorpusHeader {
    version: u32,
    #[serde(rename = "V")]
    v: usize,
    #[serde(rename = "D")]
    d: usize,
    fingerprint: String,
    #[serde(default = "one")]
    min_corpus_frequency: usize,
    vocabulary: Vec<String>,
}

fn one() -> usize {
    1
}

/// Corpus file: one JSON header line followed by one JSON line per
/// document.
pub fn write_corpus(corpus: &Corpus, path: &Path) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    write_corpus_to(corpus, &mut w).map_err(|e| match e {
        Error::Json(j) if j.is_io() => Error::io(path, j.into()),
        other => other,
    })?;
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn write_corpus_to<W: Write>(corpus: &Corpus, mut w: W) -> Result<()> {
    let header = CorpusHeader {
        version: CORPUS_FILE_VERSION,
        v: corpus.vocabulary.len(),
        d: corpus.documents.len(),
        fingerprint: corpus.fingerprint.clone(),
        min_corpus_frequency: corpus.min_corpus_frequency,
        vocabulary: corpus.vocabulary.words.clone(),
    };
    serde_json::to_writer(&mut w, &header)?;
    w.write_all(b"\n").map_err(serde_json::Error::io)?;
    for d in &corpus.documents {
        serde_json::to_writer(&mut w, d)?;
        w.write_all(b"\n").map_err(serde_json::Error::io)?;
    }
    Ok(())
}

pub fn read_corpus(path: &Path) -> Result<Corpus> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_corpus_from(BufReader::new(file))
}

pub fn read_corpus_from<R: BufRead>(r: R) -> Result<Corpus> {
    let mut lines = r.lines();
    let header_line = lines
        .next()
        .ok_or_else(|| Error::format("header", "file is empty"))?
        .map_err(|e| Error::format("header", e.to_string()))?;
    let header: CorpusHeader = serde_json::from_str(&header_line)
        .map_err(|e| Error::format("header", e.to_string()))?;
    if header.version != CORPUS_FILE_VERSION {
        return Err(Error::Version {
            found: header.version,
            expected: CORPUS_FILE_VERSION,
        });
    }
    if header.vocabulary.len() != header.v {
        return Err(Error::format(
            "V",
            format!("header says {} but vocabulary has {}", header.v, header.vocabulary.len()),
        ));
    }
    let vocabulary = Vocabulary::from_words(header.vocabulary)?;
    let mut documents = Vec::with_capacity(header.d);
    for (i, line) in lines.enumerate() {
        let line = line.map_err(|e| Error::format(format!("document {}", i + 1), e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let doc: Document = serde_json::from_str(&line)
            .map_err(|e| Error::format(format!("document {}", i + 1), e.to_string()))?;
        documents.push(doc);
    }
    if documents.len() != header.d {
        return Err(Error::format(
            "D",
            format!("header says {} but file has {} documents", header.d, documents.len()),
        ));
    }
    let corpus = Corpus::from_parts(vocabulary, documents, header.min_corpus_frequency)?;
    if corpus.fingerprint != header.fingerprint {
        return Err(Error::format(
            "fingerprint",
            format!("header {} does not match content {}", header.fingerprint, corpus.fingerprint),
        ));
    }
    Ok(corpus)
}

/// Set of document ids, for comparisons that ignore order.
pub fn doc_id_set(corpus: &Corpus) -> BTreeSet<&str> {
    corpus.documents.iter().map(|d| d.doc_id.as_str()).collect()
}
