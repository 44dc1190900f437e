use crate::crypto::{
    decrypt_legacy, derive_legacy_key, encrypt_legacy, sha256_digest, verify_timestamp_sig, CipherBlob,
};
use crate::runtime::Guid;
use crate::server::{Server, ServerError};
use crate::wire::{AccessRequest, ErrorKind, FetchRequest, ShareRequest, StoreRequest};

use super::{ShareRecord, StoredObject};

impl Server {
    /// Checks the uploaded hash against the ciphertext and persists it.
    pub fn handle_store(&self, req: &StoreRequest) -> Result<Guid, ServerError> {
        let ciphertext = CipherBlob::new(req.ciphertext.clone())
            .map_err(|e| ServerError::new(ErrorKind::MalformedBlob, e.to_string()))?;
        let actual = sha256_digest(ciphertext.as_bytes());
        if actual != req.sha256 {
            return Err(ServerError::new(
                ErrorKind::HashMismatch,
                format!("uploaded hash {} but ciphertext hashes to {actual}", req.sha256),
            ));
        }
        self.commit(|guid| StoredObject { guid, ciphertext, sha256: actual })
    }

    pub fn handle_fetch(&self, req: &FetchRequest) -> Result<CipherBlob, ServerError> {
        Ok(self.store().load::<StoredObject>(req.guid)?.ciphertext)
    }

    /// The server receives the original password, decrypts the stored file
    /// with it, and accepts exactly when the PKCS7 padding comes out valid.
    /// The recovered plaintext is re-encrypted under the sharing password.
    pub fn handle_share(&self, req: &ShareRequest) -> Result<Guid, ServerError> {
        let source = self.store().load::<StoredObject>(req.source_guid)?;
        self.note_password_use();
        let invalid = || ServerError::new(ErrorKind::InvalidPassword, "invalid original password");
        let key = derive_legacy_key(&req.original_password).map_err(|_| invalid())?;
        let plaintext = decrypt_legacy(&source.ciphertext, &key).map_err(|_| invalid())?;
        let share_key = derive_legacy_key(&req.sharing_password)
            .map_err(|e| ServerError::new(ErrorKind::BadRequest, format!("sharing password: {e}")))?;
        let share_ciphertext = encrypt_legacy(&plaintext, &share_key);
        let created_at = self.now();
        self.commit(|share_guid| ShareRecord {
            share_guid,
            source_guid: req.source_guid,
            share_ciphertext,
            address: req.address,
            created_at,
        })
    }

    pub fn handle_access(&self, req: &AccessRequest) -> Result<CipherBlob, ServerError> {
        let record = self.store().load::<ShareRecord>(req.share_guid)?;
        self.check_fresh(req.timestamp)?;
        if !verify_timestamp_sig(&record.address, req.timestamp, &req.signature) {
            return Err(ServerError::new(ErrorKind::AuthFailed, "signature does not match the share address"));
        }
        Ok(record.share_ciphertext)
    }
}
