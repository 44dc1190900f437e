//! Moving framed requests between clients and the server: an in-process
//! loopback that still goes through the byte encoding, and plain TCP.

use std::io::{self, BufReader, BufWriter};
use std::net::{SocketAddr, TcpListener, TcpStream, ToSocketAddrs};
use std::sync::Arc;
use std::thread;

use thiserror::Error;

use crate::crypto::{CryptoError, Violation};
use crate::runtime::{frame_decode, frame_encode, read_frame, write_frame, FrameError};
use crate::server::{Server, ServerError};
use crate::wire::{ErrorKind, Request, Response};

#[derive(Debug, Error)]
pub enum TransportError {
    #[error(transparent)]
    Frame(#[from] FrameError),
    #[error("connection: {0}")]
    Io(#[from] io::Error),
    #[error("connection closed before a response arrived")]
    Closed,
}

pub trait Transport: Send + Sync {
    fn round_trip(&self, request: &Request) -> Result<Response, TransportError>;
}

impl<T: Transport + ?Sized> Transport for Arc<T> {
    fn round_trip(&self, request: &Request) -> Result<Response, TransportError> {
        (**self).round_trip(request)
    }
}

impl<T: Transport + ?Sized> Transport for &T {
    fn round_trip(&self, request: &Request) -> Result<Response, TransportError> {
        (**self).round_trip(request)
    }
}

/// Calls the server in-process, through the same frame encoding as TCP.
#[derive(Clone)]
pub struct Loopback {
    server: Arc<Server>,
}

impl Loopback {
    pub fn new(server: Arc<Server>) -> Self {
        Loopback { server }
    }

    pub fn server(&self) -> &Arc<Server> {
        &self.server
    }
}

impl Transport for Loopback {
    fn round_trip(&self, request: &Request) -> Result<Response, TransportError> {
        let reply = self.server.handle_frame(&frame_encode(request)?);
        Ok(frame_decode::<Response>(&reply)?.0)
    }
}

/// One TCP connection per request.
#[derive(Debug, Clone)]
pub struct TcpTransport {
    addr: SocketAddr,
}

impl TcpTransport {
    pub fn new(addr: impl ToSocketAddrs) -> io::Result<Self> {
        let addr = addr
            .to_socket_addrs()?
            .next()
            .ok_or_else(|| io::Error::new(io::ErrorKind::InvalidInput, "address resolved to nothing"))?;
        Ok(TcpTransport { addr })
    }
}

impl Transport for TcpTransport {
    fn round_trip(&self, request: &Request) -> Result<Response, TransportError> {
        let stream = TcpStream::connect(self.addr)?;
        let mut writer = BufWriter::new(stream.try_clone()?);
        write_frame(&mut writer, request)?;
        let mut reader = BufReader::new(stream);
        read_frame::<_, Response>(&mut reader)?.ok_or(TransportError::Closed)
    }
}

/// Serves framed requests on one connection until the peer closes it or
/// sends a frame that cannot be delimited.
pub fn serve_connection(stream: TcpStream, server: &Server) -> Result<(), TransportError> {
    let mut reader = BufReader::new(stream.try_clone()?);
    let mut writer = BufWriter::new(stream);
    loop {
        let response = match read_frame::<_, Request>(&mut reader) {
            Ok(Some(request)) => server.handle(request),
            Ok(None) => return Ok(()),
            Err(e @ (FrameError::Malformed(_) | FrameError::UnknownKind { .. } | FrameError::FieldMismatch(_))) => {
                Response::Error { kind: ErrorKind::BadRequest, message: e.to_string() }
            }
            Err(e) => return Err(e.into()),
        };
        write_frame(&mut writer, &response)?;
    }
}

/// Accepts connections forever, one thread each.
pub fn serve(listener: TcpListener, server: Arc<Server>) -> io::Result<()> {
    for stream in listener.incoming() {
        let stream = stream?;
        let server = Arc::clone(&server);
        thread::spawn(move || {
            let _ = serve_connection(stream, &server);
        });
    }
    Ok(())
}

/// Binds `addr` and serves in a background thread, returning the bound address.
pub fn spawn_tcp(server: Arc<Server>, addr: impl ToSocketAddrs) -> io::Result<SocketAddr> {
    let listener = TcpListener::bind(addr)?;
    let local = listener.local_addr()?;
    thread::spawn(move || serve(listener, server));
    Ok(local)
}

#[derive(Debug, Error)]
pub enum ClientError {
    #[error("password rejected: {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    Policy(Vec<Violation>),
    #[error(transparent)]
    Crypto(#[from] CryptoError),
    #[error("server rejected the request: {0}")]
    Server(ServerError),
    #[error("unexpected response: {0}")]
    Protocol(String),
    #[error(transparent)]
    Transport(#[from] TransportError),
}

impl ClientError {
    pub fn server_kind(&self) -> Option<ErrorKind> {
        match self {
            ClientError::Server(e) => Some(e.kind),
            _ => None,
        }
    }
}

pub(crate) fn unexpected(response: Response) -> ClientError {
    match response {
        Response::Error { kind, message } => ClientError::Server(ServerError { kind, message }),
        other => ClientError::Protocol(format!("{other:?}")),
    }
}
