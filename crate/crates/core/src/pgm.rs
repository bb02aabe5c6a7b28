//! Binary (P5) and ASCII (P2) PGM codec, 8-bit only.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, PgmError, Result};
use crate::image::GrayImage;

const MAXVAL: u64 = 255;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Encoding {
    Ascii,
    Binary,
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_whitespace_and_comments(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b == b'#' {
                while let Some(&c) = self.bytes.get(self.pos) {
                    self.pos += 1;
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    /// Reads an unsigned decimal token. Returns the value and the offset the
    /// token started at.
    fn number(&mut self) -> Option<(u64, usize)> {
        self.skip_whitespace_and_comments();
        let start = self.pos;
        let mut value: u64 = 0;
        while let Some(&b) = self.bytes.get(self.pos) {
            if !b.is_ascii_digit() {
                break;
            }
            value = value.checked_mul(10)?.checked_add(u64::from(b - b'0'))?;
            self.pos += 1;
        }
        if self.pos == start {
            return None;
        }
        // A token must end at whitespace, a comment or the end of input.
        match self.bytes.get(self.pos) {
            None => Some((value, start)),
            Some(&b) if b.is_ascii_whitespace() || b == b'#' => Some((value, start)),
            Some(_) => None,
        }
    }
}

/// Decodes a PGM byte stream.
pub fn decode_pgm(bytes: &[u8]) -> Result<GrayImage, PgmError> {
    let encoding = match bytes.get(..2) {
        Some(b"P5") => Encoding::Binary,
        Some(b"P2") => Encoding::Ascii,
        _ => return Err(PgmError::BadMagic { offset: 0 }),
    };
    let mut cur = Cursor { bytes, pos: 2 };
    if !matches!(bytes.get(2), Some(b) if b.is_ascii_whitespace() || *b == b'#') {
        return Err(PgmError::BadMagic { offset: 2 });
    }

    let mut header = |field: &'static str| -> Result<(u64, usize), PgmError> {
        let offset = {
            cur.skip_whitespace_and_comments();
            cur.pos
        };
        cur.number().ok_or(PgmError::BadHeader { field, offset })
    };
    let (width, w_off) = header("width")?;
    let (height, h_off) = header("height")?;
    let (maxval, m_off) = header("maxval")?;
    if width == 0 {
        return Err(PgmError::BadHeader {
            field: "width",
            offset: w_off,
        });
    }
    if height == 0 {
        return Err(PgmError::BadHeader {
            field: "height",
            offset: h_off,
        });
    }
    if maxval != MAXVAL {
        return Err(PgmError::UnsupportedMaxval {
            maxval,
            offset: m_off,
        });
    }
    let (width, height) = (width as usize, height as usize);
    let expected = width.checked_mul(height).ok_or(PgmError::BadHeader {
        field: "width",
        offset: w_off,
    })?;

    let data = match encoding {
        Encoding::Binary => {
            // Exactly one whitespace byte separates maxval from the payload.
            match bytes.get(cur.pos) {
                Some(b) if b.is_ascii_whitespace() => cur.pos += 1,
                _ => {
                    return Err(PgmError::BadHeader {
                        field: "maxval",
                        offset: cur.pos,
                    })
                }
            }
            let payload = &bytes[cur.pos..];
            if payload.len() < expected {
                return Err(PgmError::Truncated {
                    offset: bytes.len(),
                    expected,
                    found: payload.len(),
                });
            }
            payload[..expected].to_vec()
        }
        Encoding::Ascii => {
            let mut data = Vec::with_capacity(expected);
            while data.len() < expected {
                cur.skip_whitespace_and_comments();
                if cur.pos >= bytes.len() {
                    return Err(PgmError::Truncated {
                        offset: cur.pos,
                        expected,
                        found: data.len(),
                    });
                }
                let offset = cur.pos;
                match cur.number() {
                    Some((v, _)) if v <= MAXVAL => data.push(v as u8),
                    _ => return Err(PgmError::BadSample { offset }),
                }
            }
            data
        }
    };
    GrayImage::new(width, height, data).map_err(|_| PgmError::BadHeader {
        field: "width",
        offset: w_off,
    })
}

/// Encodes an image as P5, or P2 when `ascii` is set.
pub fn encode_pgm(img: &GrayImage, ascii: bool) -> Vec<u8> {
    let magic = if ascii { "P2" } else { "P5" };
    let mut out = format!("{magic}\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    if ascii {
        for row in img.rows() {
            let line = row.iter().map(u8::to_string).collect::<Vec<_>>().join(" ");
            out.extend_from_slice(line.as_bytes());
            out.push(b'\n');
        }
    } else {
        out.extend_from_slice(img.as_raw());
    }
    out
}

pub fn read_pgm(path: impl AsRef<Path>) -> Result<GrayImage> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|source| file_error(path, source))?;
    decode_pgm(&bytes).map_err(|source| Error::Pgm {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_pgm(img: &GrayImage, path: impl AsRef<Path>, ascii: bool) -> Result<()> {
    let path = path.as_ref();
    fs::File::create(path)
        .and_then(|mut file| file.write_all(&encode_pgm(img, ascii)))
        .map_err(|source| file_error(path, source))
}

fn file_error(path: &Path, source: std::io::Error) -> Error {
    Error::File {
        path: path.to_path_buf(),
        source,
    }
}
