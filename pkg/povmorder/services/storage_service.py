"""
Storage Service - reads and writes POVM, state and pair documents as JSON.
Floats are written with full repr precision so files round-trip bit-exactly.
"""
import json
import logging
from abc import ABC, abstractmethod
from pathlib import Path
from typing import Any, Dict, Optional, Union

from pydantic import ValidationError

from povmorder.exceptions import SchemaError
from povmorder.models import DensityMatrix, Povm, PovmSchema, StateSchema

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


class StorageInterface(ABC):
    """Abstract interface for document storage."""

    @abstractmethod
    def read_json(self, path: PathLike) -> Any:
        """Read and parse a JSON document."""

    @abstractmethod
    def write_json(self, payload: Any, path: PathLike) -> Path:
        """Write a JSON document and return its path."""


class LocalStorageService(StorageInterface):
    """
    Local file storage for the shared schemas.

    Relative paths resolve against `base_path` when one is given.
    """

    def __init__(self, base_path: Optional[Path] = None):
        self.base_path = base_path

    def _resolve(self, path: PathLike) -> Path:
        path = Path(path)
        if self.base_path is not None and not path.is_absolute():
            return self.base_path / path
        return path

    def read_json(self, path: PathLike) -> Any:
        """Raises OSError for unreadable files and json.JSONDecodeError for malformed ones."""
        with open(self._resolve(path), "r", encoding="utf-8") as f:
            return json.load(f)

    def write_json(self, payload: Any, path: PathLike) -> Path:
        target = self._resolve(path)
        target.parent.mkdir(parents=True, exist_ok=True)
        with open(target, "w", encoding="utf-8") as f:
            f.write(self.dumps(payload))
            f.write("\n")
        logger.debug(f"Wrote {target}")
        return target

    @staticmethod
    def dumps(payload: Any) -> str:
        return json.dumps(payload, indent=2, sort_keys=False)

    # ==================== Schema conversion ====================

    @staticmethod
    def parse_povm_document(data: Any) -> PovmSchema:
        try:
            return PovmSchema.model_validate(data)
        except ValidationError as e:
            raise SchemaError(f"Not a POVM document: {e.errors()[0]['msg']}")

    @classmethod
    def parse_povm(cls, data: Any) -> Povm:
        return cls.parse_povm_document(data).to_povm()

    @staticmethod
    def parse_state(data: Any) -> DensityMatrix:
        try:
            return StateSchema.model_validate(data).to_density()
        except ValidationError as e:
            raise SchemaError(f"Not a state document: {e.errors()[0]['msg']}")

    def load_povm_document(self, path: PathLike) -> PovmSchema:
        return self.parse_povm_document(self.read_json(path))

    def load_povm(self, path: PathLike) -> Povm:
        return self.parse_povm(self.read_json(path))

    def load_state(self, path: PathLike) -> DensityMatrix:
        return self.parse_state(self.read_json(path))

    def save_povm(self, povm: Povm, path: PathLike) -> Path:
        return self.write_json(PovmSchema.from_povm(povm).model_dump(), path)

    def save_state(self, state: Any, path: PathLike) -> Path:
        return self.write_json(StateSchema.from_matrix(state).model_dump(), path)

    def save_bundle(self, documents: Dict[str, Any], directory: PathLike) -> Dict[str, Path]:
        """Write several named documents (POVMs, states or plain payloads) into one directory."""
        written = {}
        for name, document in documents.items():
            if isinstance(document, Povm):
                written[name] = self.save_povm(document, Path(directory) / f"{name}.json")
            elif isinstance(document, DensityMatrix):
                written[name] = self.save_state(document, Path(directory) / f"{name}.json")
            else:
                written[name] = self.write_json(document, Path(directory) / f"{name}.json")
        return written


def create_storage_service(base_path: Optional[Path] = None) -> LocalStorageService:
    """Factory function to create a storage service."""
    return LocalStorageService(base_path)


# Default storage instance
storage_service = create_storage_service()
