use crate::crypto::{
    decrypt_legacy, derive_legacy_key, derive_share_keypair, encrypt_legacy, sha256_digest, sign_timestamp,
    validate_password, CipherBlob, PasswordPolicy,
};
use crate::runtime::Guid;
use crate::transport::{unexpected, ClientError, Transport};
use crate::wire::{AccessRequest, FetchRequest, Request, Response, ShareRequest, StoreRequest};

/// The browser side of the legacy service.
pub struct LegacyClient<T> {
    transport: T,
    policy: PasswordPolicy,
}

impl<T: Transport> LegacyClient<T> {
    pub fn new(transport: T, policy: PasswordPolicy) -> Self {
        LegacyClient { transport, policy }
    }

    pub fn policy(&self) -> &PasswordPolicy {
        &self.policy
    }

    pub fn transport(&self) -> &T {
        &self.transport
    }

    fn check(&self, password: &str) -> Result<(), ClientError> {
        validate_password(password, &self.policy).map_err(ClientError::Policy)
    }

    /// Encrypts locally under the zero-padded key and uploads ciphertext and hash.
    pub fn store(&self, plaintext: &[u8], password: &str) -> Result<Guid, ClientError> {
        self.check(password)?;
        let blob = encrypt_legacy(plaintext, &derive_legacy_key(password)?);
        let sha256 = sha256_digest(blob.as_bytes());
        self.submit_store(StoreRequest { ciphertext: blob.into_bytes(), sha256 })
    }

    pub fn submit_store(&self, req: StoreRequest) -> Result<Guid, ClientError> {
        match self.transport.round_trip(&Request::Store(req))? {
            Response::Stored { guid } => Ok(guid),
            other => Err(unexpected(other)),
        }
    }

    /// Downloads the ciphertext; no password involved.
    pub fn fetch_ciphertext(&self, guid: Guid) -> Result<CipherBlob, ClientError> {
        match self.transport.round_trip(&Request::Fetch(FetchRequest { guid }))? {
            Response::Blob { ciphertext } => Ok(CipherBlob::new(ciphertext)?),
            other => Err(unexpected(other)),
        }
    }

    pub fn fetch(&self, guid: Guid, password: &str) -> Result<Vec<u8>, ClientError> {
        let blob = self.fetch_ciphertext(guid)?;
        Ok(decrypt_legacy(&blob, &derive_legacy_key(password)?)?)
    }

    /// Sends both passwords, in the clear, together with the share address.
    pub fn share(
        &self,
        source_guid: Guid,
        original_password: &str,
        sharing_password: &str,
    ) -> Result<Guid, ClientError> {
        self.check(original_password)?;
        self.check(sharing_password)?;
        let address = derive_share_keypair(sharing_password)?.address();
        self.submit_share(ShareRequest {
            source_guid,
            original_password: original_password.to_owned(),
            sharing_password: sharing_password.to_owned(),
            address,
        })
    }

    /// Sends a share request as given, bypassing the client-side policy.
    pub fn submit_share(&self, req: ShareRequest) -> Result<Guid, ClientError> {
        match self.transport.round_trip(&Request::Share(req))? {
            Response::Shared { share_guid } => Ok(share_guid),
            other => Err(unexpected(other)),
        }
    }

    /// Regenerates the keypair from the sharing password, signs `now` and
    /// returns the shared ciphertext.
    pub fn access_ciphertext(
        &self,
        share_guid: Guid,
        sharing_password: &str,
        now: u64,
    ) -> Result<CipherBlob, ClientError> {
        let keypair = derive_share_keypair(sharing_password)?;
        let signature = sign_timestamp(&keypair, now).as_bytes().to_vec();
        self.submit_access(AccessRequest { share_guid, timestamp: now, signature })
    }

    pub fn submit_access(&self, req: AccessRequest) -> Result<CipherBlob, ClientError> {
        match self.transport.round_trip(&Request::Access(req))? {
            Response::Blob { ciphertext } => Ok(CipherBlob::new(ciphertext)?),
            other => Err(unexpected(other)),
        }
    }

    pub fn access_shared(&self, share_guid: Guid, sharing_password: &str, now: u64) -> Result<Vec<u8>, ClientError> {
        let blob = self.access_ciphertext(share_guid, sharing_password, now)?;
        Ok(decrypt_legacy(&blob, &derive_legacy_key(sharing_password)?)?)
    }
}
