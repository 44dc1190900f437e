use std::sync::Mutex;

use rand::rngs::StdRng;
use rand::SeedableRng;

use crate::crypto::{
    decrypt_hardened, derive_hardened_share_keypair, encrypt_hardened, hardened_digest, password_strength_check,
    sign_timestamp, CipherBlob, HardenedHeader, HardenedPolicy,
};
use crate::runtime::Guid;
use crate::transport::{unexpected, ClientError, Transport};
use crate::wire::{AccessRequest, FetchRequest, HardenedShareUpload, HardenedUpload, Request, Response};

pub struct HardenedClient<T> {
    transport: T,
    policy: HardenedPolicy,
    rng: Mutex<StdRng>,
}

impl<T: Transport> HardenedClient<T> {
    pub fn new(transport: T, policy: HardenedPolicy) -> Self {
        Self::with_rng(transport, policy, StdRng::from_entropy())
    }

    pub fn with_rng(transport: T, policy: HardenedPolicy, rng: StdRng) -> Self {
        HardenedClient { transport, policy, rng: Mutex::new(rng) }
    }

    pub fn policy(&self) -> &HardenedPolicy {
        &self.policy
    }

    fn check(&self, password: &str) -> Result<(), ClientError> {
        password_strength_check(password, &self.policy).map_err(ClientError::Policy)
    }

    fn seal(&self, plaintext: &[u8], password: &str) -> Result<(HardenedHeader, CipherBlob), ClientError> {
        let mut rng = self.rng.lock().expect("client rng lock");
        Ok(encrypt_hardened(plaintext, password, &self.policy, &mut *rng)?)
    }

    /// Weak passwords are refused before anything is sent.
    pub fn store(&self, plaintext: &[u8], password: &str) -> Result<Guid, ClientError> {
        self.check(password)?;
        let (header, blob) = self.seal(plaintext, password)?;
        let sha256 = hardened_digest(&header, &blob);
        let req = HardenedUpload { header, ciphertext: blob.into_bytes(), sha256 };
        match self.transport.round_trip(&Request::Hstore(req))? {
            Response::Stored { guid } => Ok(guid),
            other => Err(unexpected(other)),
        }
    }

    pub fn fetch_sealed(&self, guid: Guid) -> Result<(HardenedHeader, CipherBlob), ClientError> {
        match self.transport.round_trip(&Request::Hfetch(FetchRequest { guid }))? {
            Response::HardenedBlob { header, ciphertext } => Ok((header, CipherBlob::new(ciphertext)?)),
            other => Err(unexpected(other)),
        }
    }

    pub fn fetch(&self, guid: Guid, password: &str) -> Result<Vec<u8>, ClientError> {
        let (header, blob) = self.fetch_sealed(guid)?;
        Ok(decrypt_hardened(&header, &blob, password)?)
    }

    /// Fetches and decrypts the source locally, re-encrypts it under the
    /// sharing password with a fresh header, and uploads the result bound to
    /// the sharing password's address. A wrong original password fails here,
    /// on the client.
    pub fn share(
        &self,
        source_guid: Guid,
        original_password: &str,
        sharing_password: &str,
    ) -> Result<Guid, ClientError> {
        self.check(original_password)?;
        self.check(sharing_password)?;
        let plaintext = self.fetch(source_guid, original_password)?;
        let (header, blob) = self.seal(&plaintext, sharing_password)?;
        let address = derive_hardened_share_keypair(sharing_password)?.address();
        let sha256 = hardened_digest(&header, &blob);
        let req = HardenedShareUpload { header, ciphertext: blob.into_bytes(), sha256, address };
        match self.transport.round_trip(&Request::HshareUpload(req))? {
            Response::Shared { share_guid } => Ok(share_guid),
            other => Err(unexpected(other)),
        }
    }

    pub fn access_sealed(
        &self,
        share_guid: Guid,
        sharing_password: &str,
        now: u64,
    ) -> Result<(HardenedHeader, CipherBlob), ClientError> {
        let keypair = derive_hardened_share_keypair(sharing_password)?;
        let signature = sign_timestamp(&keypair, now).as_bytes().to_vec();
        self.submit_access(AccessRequest { share_guid, timestamp: now, signature })
    }

    pub fn submit_access(&self, req: AccessRequest) -> Result<(HardenedHeader, CipherBlob), ClientError> {
        match self.transport.round_trip(&Request::Haccess(req))? {
            Response::HardenedBlob { header, ciphertext } => Ok((header, CipherBlob::new(ciphertext)?)),
            other => Err(unexpected(other)),
        }
    }

    pub fn access(&self, share_guid: Guid, sharing_password: &str, now: u64) -> Result<Vec<u8>, ClientError> {
        let (header, blob) = self.access_sealed(share_guid, sharing_password, now)?;
        Ok(decrypt_hardened(&header, &blob, sharing_password)?)
    }
}
