//! Corpus readers for plain text and EVA transliterations.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use unicode_properties::{GeneralCategoryGroup, UnicodeGeneralCategory};
use unicode_segmentation::UnicodeSegmentation;

use crate::corpus::{is_reserved, Alphabet, Corpus, Sentence, Word};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[serde(alias = "plain", alias = "text")]
    PlainText,
    Eva,
}

/// A source file decoded as UTF-8. Invalid UTF-8 is an error, never replaced.
#[derive(Debug, Clone)]
pub struct RawDocument {
    pub source_path: PathBuf,
    pub format: Format,
    pub content: String,
}

impl RawDocument {
    pub fn load(path: impl AsRef<Path>, format: Format) -> Result<Self> {
        let path = path.as_ref();
        let bytes = fs::read(path).map_err(|source| Error::Io {
            path: path.to_owned(),
            source,
        })?;
        let content = String::from_utf8(bytes).map_err(|e| Error::Decode {
            path: path.to_owned(),
            offset: e.utf8_error().valid_up_to(),
        })?;
        Ok(Self {
            source_path: path.to_owned(),
            format,
            content,
        })
    }

    pub fn into_corpus(self, id: &str, options: &IngestOptions) -> Result<Corpus> {
        match self.format {
            Format::PlainText => parse_plaintext(&self.content, id, &options.normalization),
            Format::Eva => parse_eva(&self.content, id, &options.eva),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct IngestOptions {
    pub normalization: NormalizationProfile,
    pub eva: EvaOptions,
}

/// Text normalization applied to natural-language corpora before grapheme
/// segmentation. Stripped characters act as word separators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct NormalizationProfile {
    pub lowercase: bool,
    /// Unicode general category P*, which includes apostrophes and hyphens.
    pub strip_punctuation: bool,
    /// Unicode general category N*.
    pub strip_digits: bool,
    /// Unicode general category S*: currency, math and other signs.
    pub strip_symbols: bool,
}

impl Default for NormalizationProfile {
    fn default() -> Self {
        Self {
            lowercase: true,
            strip_punctuation: true,
            strip_digits: true,
            strip_symbols: true,
        }
    }
}

impl NormalizationProfile {
    fn strips(&self, c: char) -> bool {
        match c.general_category_group() {
            GeneralCategoryGroup::Punctuation => self.strip_punctuation,
            GeneralCategoryGroup::Number => self.strip_digits,
            GeneralCategoryGroup::Symbol => self.strip_symbols,
            _ => false,
        }
    }

    /// Normalizes one line and splits it into words of grapheme clusters.
    pub fn words(&self, line: &str) -> Vec<Vec<String>> {
        let lowered;
        let line = if self.lowercase {
            lowered = line.to_lowercase();
            lowered.as_str()
        } else {
            line
        };
        let cleaned: String = line
            .chars()
            .map(|c| if self.strips(c) { ' ' } else { c })
            .collect();
        cleaned
            .split_whitespace()
            .map(|w| w.graphemes(true).map(str::to_owned).collect())
            .collect()
    }
}

fn check_reserved(line: &str, line_no: usize) -> Result<()> {
    match line.chars().find(|&c| is_reserved(c)) {
        Some(c) => Err(Error::ReservedCodePoint {
            line: line_no,
            code: c as u32,
        }),
        None => Ok(()),
    }
}

struct CorpusBuilder {
    alphabet: Alphabet,
    sentences: Vec<Sentence>,
}

impl CorpusBuilder {
    fn new() -> Self {
        Self {
            alphabet: Alphabet::new(),
            sentences: Vec::new(),
        }
    }

    fn push_line<S: AsRef<str>>(&mut self, words: &[Vec<S>], line_no: usize) {
        let words: Vec<Word> = words
            .iter()
            .filter_map(|w| Word::new(w.iter().map(|g| self.alphabet.intern(g.as_ref())).collect()))
            .collect();
        if let Some(sentence) = Sentence::new(words, line_no) {
            self.sentences.push(sentence);
        }
    }

    fn finish(self, id: &str) -> Result<Corpus> {
        if self.sentences.is_empty() {
            return Err(Error::EmptyCorpus { id: id.to_owned() });
        }
        Ok(Corpus::new(id, self.sentences, self.alphabet))
    }
}

fn lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.split('\n')
        .enumerate()
        .map(|(i, l)| (i + 1, l.strip_suffix('\r').unwrap_or(l)))
}

/// One sentence per non-empty line after normalization.
pub fn parse_plaintext(text: &str, id: &str, profile: &NormalizationProfile) -> Result<Corpus> {
    let mut builder = CorpusBuilder::new();
    for (line_no, line) in lines(text) {
        check_reserved(line, line_no)?;
        builder.push_line(&profile.words(line), line_no);
    }
    builder.finish(id)
}

pub fn read_plaintext(path: impl AsRef<Path>, id: &str) -> Result<Corpus> {
    read_plaintext_with(path, id, &NormalizationProfile::default())
}

pub fn read_plaintext_with(
    path: impl AsRef<Path>,
    id: &str,
    profile: &NormalizationProfile,
) -> Result<Corpus> {
    let doc = RawDocument::load(path, Format::PlainText)?;
    parse_plaintext(&doc.content, id, profile)
}

/// Which alternative of a `[a:b]` variant reading to keep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AlternativeReading {
    #[default]
    First,
    Last,
}

/// Treatment of words containing illegible glyphs (`?`, `*`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IllegiblePolicy {
    #[default]
    DropWord,
    /// Keep the marker as an ordinary grapheme.
    Keep,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct EvaOptions {
    pub alternative: AlternativeReading,
    pub illegible: IllegiblePolicy,
    /// Keep only locus lines tagged `;<id>` (interlinear files); untagged
    /// lines are always kept.
    pub transcriber: Option<String>,
}

/// Parses an EVA transliteration.
///
/// Markup handled per line:
/// - `#...` comment lines are skipped;
/// - `<...>` locus tags, page headers, inline comments and break markers are
///   removed and act as word separators;
/// - `.`, `,`, whitespace, `-` and `=` separate words;
/// - `[a:b]` / `[a|b]` keep one alternative per [`EvaOptions::alternative`];
/// - `{...}` groups are unwrapped, `{&...}` / `{!...}` comments are dropped;
/// - `@123;` and `&123;` extended glyph codes become one grapheme each;
/// - `!` and `%` fillers are dropped.
///
/// Every other character is one grapheme. Lines left empty are dropped.
pub fn parse_eva(text: &str, id: &str, options: &EvaOptions) -> Result<Corpus> {
    let mut builder = CorpusBuilder::new();
    for (line_no, line) in lines(text) {
        if line.trim_start().starts_with('#') {
            continue;
        }
        check_reserved(line, line_no)?;
        if let Some(wanted) = &options.transcriber {
            if let Some(tag) = transcriber_tag(line) {
                if tag != wanted {
                    continue;
                }
            }
        }
        let words = EvaLine::new(line, line_no, options).parse()?;
        builder.push_line(&words, line_no);
    }
    builder.finish(id)
}

pub fn read_eva(path: impl AsRef<Path>, id: &str) -> Result<Corpus> {
    read_eva_with(path, id, &EvaOptions::default())
}

pub fn read_eva_with(path: impl AsRef<Path>, id: &str, options: &EvaOptions) -> Result<Corpus> {
    let doc = RawDocument::load(path, Format::Eva)?;
    parse_eva(&doc.content, id, options)
}

/// `<f1r.P1.1;H>` -> `Some("H")`.
fn transcriber_tag(line: &str) -> Option<&str> {
    let rest = line.trim_start().strip_prefix('<')?;
    let tag = &rest[..rest.find('>')?];
    tag.rsplit_once(';').map(|(_, t)| t)
}

struct EvaLine<'a> {
    chars: Vec<char>,
    pos: usize,
    line_no: usize,
    options: &'a EvaOptions,
    words: Vec<Vec<String>>,
    current: Vec<String>,
    illegible: bool,
}

impl<'a> EvaLine<'a> {
    fn new(line: &str, line_no: usize, options: &'a EvaOptions) -> Self {
        Self {
            chars: line.chars().collect(),
            pos: 0,
            line_no,
            options,
            words: Vec::new(),
            current: Vec::new(),
            illegible: false,
        }
    }

    fn malformed(&self, reason: impl Into<String>) -> Error {
        Error::MalformedEva {
            line: self.line_no,
            reason: reason.into(),
        }
    }

    fn end_word(&mut self) {
        let word = std::mem::take(&mut self.current);
        if !word.is_empty() && !self.illegible {
            self.words.push(word);
        }
        self.illegible = false;
    }

    /// Returns the text between the current position and `close`, leaving the
    /// cursor after `close`.
    fn take_until(&mut self, open: char, close: char) -> Result<String> {
        let start = self.pos;
        while self.pos < self.chars.len() {
            let c = self.chars[self.pos];
            self.pos += 1;
            if c == close {
                return Ok(self.chars[start..self.pos - 1].iter().collect());
            }
        }
        Err(self.malformed(format!("unterminated `{open}`")))
    }

    fn glyph(&mut self, c: char) {
        match c {
            '?' | '*' if self.options.illegible == IllegiblePolicy::DropWord => {
                self.illegible = true
            }
            _ => self.current.push(c.to_string()),
        }
    }

    /// Extended glyph code such as `@254;` or `&254;`.
    fn extended(&mut self, sigil: char) {
        let start = self.pos;
        while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == start {
            self.current.push(sigil.to_string());
            return;
        }
        let mut code: String = std::iter::once(sigil)
            .chain(self.chars[start..self.pos].iter().copied())
            .collect();
        if self.chars.get(self.pos) == Some(&';') {
            self.pos += 1;
        }
        code.push(';');
        self.current.push(code);
    }

    fn parse(mut self) -> Result<Vec<Vec<String>>> {
        while self.pos < self.chars.len() {
            let c = self.chars[self.pos];
            self.pos += 1;
            match c {
                '<' => {
                    self.take_until('<', '>')?;
                    self.end_word();
                }
                '[' => {
                    let body = self.take_until('[', ']')?;
                    let mut alternatives = body.split([':', '|']);
                    let chosen = match self.options.alternative {
                        AlternativeReading::First => alternatives.next(),
                        AlternativeReading::Last => alternatives.next_back(),
                    };
                    for g in chosen.unwrap_or("").chars() {
                        self.glyph(g);
                    }
                }
                '{' => {
                    let body = self.take_until('{', '}')?;
                    if !body.starts_with(['&', '!']) {
                        for g in body.chars() {
                            self.glyph(g);
                        }
                    }
                }
                '@' | '&' => self.extended(c),
                '>' | ']' | '}' => return Err(self.malformed(format!("unmatched `{c}`"))),
                '.' | ',' | '-' | '=' => self.end_word(),
                '!' | '%' => {}
                c if c.is_whitespace() => self.end_word(),
                c => self.glyph(c),
            }
        }
        self.end_word();
        Ok(self.words)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spelled(corpus: &Corpus) -> Vec<Vec<Vec<String>>> {
        corpus
            .sentences()
            .iter()
            .map(|s| {
                s.words()
                    .iter()
                    .map(|w| {
                        w.graphemes()
                            .iter()
                            .map(|&g| corpus.alphabet().resolve(g).to_owned())
                            .collect()
                    })
                    .collect()
            })
            .collect()
    }

    fn v(words: &[&str]) -> Vec<Vec<String>> {
        words
            .iter()
            .map(|w| w.chars().map(|c| c.to_string()).collect())
            .collect()
    }

    #[test]
    fn plaintext_strips_case_and_punctuation() {
        let c = parse_plaintext("Ab, cd!\n\n", "t", &NormalizationProfile::default()).unwrap();
        assert_eq!(spelled(&c), vec![v(&["ab", "cd"])]);
        assert_eq!(c.sentences()[0].origin_line, 1);
    }

    #[test]
    fn plaintext_blank_lines_are_dropped_in_order() {
        let c = parse_plaintext("one\n\nthree\n", "t", &NormalizationProfile::default()).unwrap();
        assert_eq!(spelled(&c), vec![v(&["one"]), v(&["three"])]);
        let lines: Vec<_> = c.sentences().iter().map(|s| s.origin_line).collect();
        assert_eq!(lines, vec![1, 3]);
    }

    #[test]
    fn plaintext_empty_is_an_error() {
        let err = parse_plaintext("", "t", &NormalizationProfile::default()).unwrap_err();
        assert!(matches!(err, Error::EmptyCorpus { .. }));
        let err =
            parse_plaintext("123 ... !!\n", "t", &NormalizationProfile::default()).unwrap_err();
        assert!(matches!(err, Error::EmptyCorpus { .. }));
    }

    #[test]
    fn plaintext_digits_and_dashes_separate_words() {
        let c = parse_plaintext(
            "ago—never 42nd people's",
            "t",
            &NormalizationProfile::default(),
        )
        .unwrap();
        assert_eq!(spelled(&c), vec![v(&["ago", "never", "nd", "people", "s"])]);
    }

    #[test]
    fn profile_can_keep_everything() {
        let profile = NormalizationProfile {
            lowercase: false,
            strip_punctuation: false,
            strip_digits: false,
            strip_symbols: false,
        };
        let c = parse_plaintext("Ab, 1! $5", "t", &profile).unwrap();
        assert_eq!(spelled(&c), vec![v(&["Ab,", "1!", "$5"])]);
    }

    #[test]
    fn default_profile_strips_signs() {
        let c = parse_plaintext("a $5 fee + 2£", "t", &NormalizationProfile::default()).unwrap();
        assert_eq!(spelled(&c), vec![v(&["a", "fee"])]);
    }

    #[test]
    fn graphemes_are_extended_clusters() {
        // Hebrew shin with a shin dot is one cluster.
        let c = parse_plaintext(
            "\u{05E9}\u{05C1}\u{05DC}",
            "t",
            &NormalizationProfile::default(),
        )
        .unwrap();
        assert_eq!(
            spelled(&c),
            vec![vec![vec![
                "\u{05E9}\u{05C1}".to_owned(),
                "\u{05DC}".to_owned()
            ]]]
        );
    }

    #[test]
    fn reserved_code_points_are_rejected() {
        let err =
            parse_plaintext("ok\nbad\u{0002}x", "t", &NormalizationProfile::default()).unwrap_err();
        assert!(matches!(err, Error::ReservedCodePoint { line: 2, code: 2 }));
        let err = parse_eva("da\u{0001}in", "t", &EvaOptions::default()).unwrap_err();
        assert!(matches!(err, Error::ReservedCodePoint { line: 1, code: 1 }));
    }

    #[test]
    fn eva_locus_prefix_and_separators() {
        let c = parse_eva("<f1r.1> fachys.ykal", "v", &EvaOptions::default()).unwrap();
        assert_eq!(spelled(&c), vec![v(&["fachys", "ykal"])]);
    }

    #[test]
    fn eva_metadata_only_is_empty() {
        let err = parse_eva("<f1r> <! comment>", "v", &EvaOptions::default()).unwrap_err();
        assert!(matches!(err, Error::EmptyCorpus { .. }));
    }

    #[test]
    fn eva_repeated_word() {
        let c = parse_eva("daiin.daiin", "v", &EvaOptions::default()).unwrap();
        assert_eq!(spelled(&c), vec![v(&["daiin", "daiin"])]);
        assert_eq!(c.alphabet().len(), 4);
    }

    #[test]
    fn eva_markup() {
        let text = "# header comment\n\
                    <f1r>    <! $I=H $Q=A>\n\
                    <f1r.1,@P0>  fach[y:a]s.yk<!plant>al,ar-\n\
                    <f1r.2,+P0>  d{ch}ey!!.qo?dy.@185;y=\n";
        let c = parse_eva(text, "v", &EvaOptions::default()).unwrap();
        assert_eq!(c.sentences().len(), 2);
        assert_eq!(c.sentences()[0].origin_line, 3);
        let words = spelled(&c);
        assert_eq!(words[0], v(&["fachys", "yk", "al", "ar"]));
        assert_eq!(words[1][0], v(&["dchey"])[0]);
        assert_eq!(words[1][1], vec!["@185;".to_owned(), "y".to_owned()]);
        assert_eq!(words[1].len(), 2);
    }

    #[test]
    fn eva_alternatives_and_illegible_are_configurable() {
        let options = EvaOptions {
            alternative: AlternativeReading::Last,
            illegible: IllegiblePolicy::Keep,
            transcriber: None,
        };
        let c = parse_eva("o[k:t]a.q*y", "v", &options).unwrap();
        assert_eq!(spelled(&c), vec![v(&["ota", "q*y"])]);
    }

    #[test]
    fn eva_transcriber_filter() {
        let text = "<f1r.P1.1;H> okal\n<f1r.P1.1;C> okar\n";
        let options = EvaOptions {
            transcriber: Some("H".into()),
            ..EvaOptions::default()
        };
        let c = parse_eva(text, "v", &options).unwrap();
        assert_eq!(spelled(&c), vec![v(&["okal"])]);
    }

    #[test]
    fn eva_unbalanced_markup_is_an_error() {
        for bad in ["<f1r.1 daiin", "dai]in", "o[k:t"] {
            let err = parse_eva(bad, "v", &EvaOptions::default()).unwrap_err();
            assert!(matches!(err, Error::MalformedEva { line: 1, .. }), "{bad}");
        }
    }

    #[test]
    fn invalid_utf8_is_a_decode_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.txt");
        fs::write(&path, b"ok\n\xff\xfe").unwrap();
        let err = read_plaintext(&path, "t").unwrap_err();
        assert!(matches!(err, Error::Decode { offset: 3, .. }));
        let err = read_plaintext(dir.path().join("missing.txt"), "t").unwrap_err();
        assert!(matches!(err, Error::Io { .. }));
    }
}
