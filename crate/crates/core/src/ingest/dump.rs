//! Streaming reader for Stack Exchange data-dump XML (`Posts.xml`, `Comments.xml`).
//!
//! The dump is one root element (`<posts>`, `<comments>`) holding self-closing `<row .../>`
//! elements. Only `Id`, `Body`, `Title` and `PostTypeId` are consulted; comment rows in the
//! public archive carry their text in `Text`, which is read as the body for [`DumpKind::Comments`].

use std::io::BufRead;

use quick_xml::events::{BytesStart, Event};
use quick_xml::{Reader, XmlVersion};

use crate::error::{Error, Result};

/// What a [`RawDocument`] was extracted from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DocumentKind {
    Post,
    Comment,
    Title,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Source {
    StackExchangeSE,
    StackOverflow,
    #[default]
    Other,
}

/// Which dump file is being read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DumpKind {
    Posts,
    Comments,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawDocument {
    pub id: String,
    pub kind: DocumentKind,
    /// Entity-decoded body; still HTML for posts.
    pub body: String,
    pub source: Source,
}

/// Counters accumulated while reading a dump.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DumpStats {
    pub rows: usize,
    pub bodies: usize,
    pub titles: usize,
    /// Rows without a non-empty body (or without an `Id`).
    pub skipped: usize,
}

/// Single-pass iterator over the documents of a dump file.
///
/// Yields one document per row with a non-empty body, followed by a [`DocumentKind::Title`]
/// document when a post row also has a non-empty title. A malformed document ends iteration
/// with [`Error::Xml`] carrying the byte offset of the failure.
pub struct DumpReader<R: BufRead> {
    reader: Reader<R>,
    kind: DumpKind,
    source: Source,
    buf: Vec<u8>,
    pending_title: Option<RawDocument>,
    stats: DumpStats,
    done: bool,
}

/// Parses a dump stream. See [`DumpReader`].
pub fn parse_dump<R: BufRead>(stream: R, kind: DumpKind) -> DumpReader<R> {
    DumpReader::new(stream, kind)
}

impl<R: BufRead> DumpReader<R> {
    pub fn new(stream: R, kind: DumpKind) -> Self {
        let mut reader = Reader::from_reader(stream);
        reader.config_mut().check_end_names = true;
        DumpReader {
            reader,
            kind,
            source: Source::Other,
            buf: Vec::new(),
            pending_title: None,
            stats: DumpStats::default(),
            done: false,
        }
    }

    pub fn with_source(mut self, source: Source) -> Self {
        self.source = source;
        self
    }

    pub fn stats(&self) -> DumpStats {
        self.stats
    }

    fn xml_error(&self, message: impl ToString) -> Error {
        Error::Xml {
            offset: self.reader.error_position(),
            message: message.to_string(),
        }
    }

    /// `row_offset` is the byte offset of the row's `<`; attribute errors report it.
    fn row(&mut self, start: &BytesStart<'_>, row_offset: u64) -> Result<Option<RawDocument>> {
        self.stats.rows += 1;
        let mut id = None;
        let mut body = None;
        let mut title = None;
        let body_key: &str = match self.kind {
            DumpKind::Posts => "Body",
            DumpKind::Comments => "Text",
        };
        for attr in start.attributes() {
            let attr = attr.map_err(|e| Error::Xml {
                offset: row_offset,
                message: e.to_string(),
            })?;
            let key: &str = attr.key.as_ref();
            let slot = if key == "Id" {
                &mut id
            } else if key == "Body" || key == body_key {
                &mut body
            } else if key == "Title" && self.kind == DumpKind::Posts {
                &mut title
            } else {
                continue;
            };
            let value = attr
                .normalized_value(XmlVersion::Implicit1_0)
                .map_err(|e| Error::Xml {
                    offset: row_offset,
                    message: e.to_string(),
                })?;
            *slot = Some(value.into_owned());
        }

        let Some(id) = id.filter(|s| !s.is_empty()) else {
            self.stats.skipped += 1;
            log::debug!("skipping dump row without Id");
            return Ok(None);
        };
        let title = title.filter(|t| !t.trim().is_empty()).map(|t| RawDocument {
            id: id.clone(),
            kind: DocumentKind::Title,
            body: t,
            source: self.source,
        });
        let doc_kind = match self.kind {
            DumpKind::Posts => DocumentKind::Post,
            DumpKind::Comments => DocumentKind::Comment,
        };
        let body = match body.filter(|b| !b.trim().is_empty()) {
            Some(body) => Some(RawDocument {
                id,
                kind: doc_kind,
                body,
                source: self.source,
            }),
            None => {
                self.stats.skipped += 1;
                None
            }
        };
        if title.is_some() {
            self.stats.titles += 1;
        }
        if body.is_some() {
            self.stats.bodies += 1;
        }
        Ok(match (body, title) {
            (Some(b), t) => {
                self.pending_title = t;
                Some(b)
            }
            (None, t) => t,
        })
    }
}

impl<R: BufRead> Iterator for DumpReader<R> {
    type Item = Result<RawDocument>;

    fn next(&mut self) -> Option<Self::Item> {
        if let Some(title) = self.pending_title.take() {
            return Some(Ok(title));
        }
        while !self.done {
            self.buf.clear();
            let event = match self.reader.read_event_into(&mut self.buf) {
                Ok(event) => event.into_owned(),
                Err(e) => {
                    self.done = true;
                    return Some(Err(self.xml_error(e)));
                }
            };
            // `<` + content + `/>` or `>`
            let markup = if matches!(event, Event::Empty(_)) { 3 } else { 2 };
            match event {
                Event::Empty(start) | Event::Start(start) if start.name().as_ref() == "row" => {
                    let row_offset = self.reader.buffer_position() - (start.len() as u64 + markup);
                    match self.row(&start, row_offset) {
                        Ok(Some(doc)) => return Some(Ok(doc)),
                        Ok(None) => {}
                        Err(e) => {
                            self.done = true;
                            return Some(Err(e));
                        }
                    }
                }
                Event::Eof => {
                    self.done = true;
                    if self.stats.skipped > 0 {
                        log::info!("skipped {} dump rows without a body", self.stats.skipped);
                    }
                }
                _ => {}
            }
        }
        None
    }
}
