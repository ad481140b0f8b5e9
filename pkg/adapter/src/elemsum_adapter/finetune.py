"""LoRA fine-tune driver consuming the pipeline's training JSONL and
hyperparameter config.

The hyperparameters are taken verbatim from the config file emitted by the
pipeline and logged line by line before anything heavy loads; this driver
never substitutes its own values.  --dry-run stops after logging the
resolved configuration.
"""

from __future__ import annotations

import json
from pathlib import Path

from .config import AdapterConfig, AdapterError

_CORE_KEYS = ("lora_rank", "lora_alpha", "lora_dropout", "epochs")


def resolve_finetune_config(config: AdapterConfig) -> dict:
    """Validate inputs and load the hyperparameter file; no model touched."""
    if not config.training_data:
        raise AdapterError("run_finetune needs --training-data")
    if not Path(config.training_data).exists():
        raise AdapterError(f"training file not found: {config.training_data}")
    if not config.finetune_config:
        raise AdapterError("run_finetune needs --finetune-config")
    try:
        with open(config.finetune_config, encoding="utf-8") as fh:
            resolved = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise AdapterError(
            f"could not read finetune config {config.finetune_config}: {exc}"
        ) from exc
    missing = [key for key in _CORE_KEYS if key not in resolved]
    if missing:
        raise AdapterError(
            f"finetune config {config.finetune_config} misses keys {missing}")
    return resolved


def run_finetune(config: AdapterConfig) -> Path | None:
    """Launch (or dry-run) parameter-efficient fine-tuning.

    Returns the adapter weights directory, or None for a dry run.
    """
    resolved = resolve_finetune_config(config)
    print(
        "resolved finetune config: "
        f"r={resolved['lora_rank']}, alpha={resolved['lora_alpha']}, "
        f"dropout={resolved['lora_dropout']}, epochs={resolved['epochs']}"
    )
    extras = {k: v for k, v in sorted(resolved.items()) if k not in _CORE_KEYS}
    if extras:
        print("extra finetune options: "
              + ", ".join(f"{k}={v}" for k, v in extras.items()))
    print(f"base model: {config.base_model}")
    print(f"training data: {config.training_data}")
    if config.dry_run:
        print("dry run: nothing trained")
        return None

    try:
        import torch
        from peft import LoraConfig, get_peft_model
        from transformers import (AutoModelForCausalLM, AutoTokenizer,
                                  Trainer, TrainingArguments)
    except ImportError as exc:
        raise AdapterError(
            "fine-tuning needs torch, transformers, and peft "
            f"(pip install elemsum-adapter[finetune]): {exc}") from exc

    if config.device.startswith("cuda") and not torch.cuda.is_available():
        raise AdapterError(
            f"device {config.device!r} requested but CUDA is not available")

    try:
        tokenizer = AutoTokenizer.from_pretrained(config.base_model)
        model = AutoModelForCausalLM.from_pretrained(config.base_model)
    except Exception as exc:
        raise AdapterError(
            f"could not load base model {config.base_model!r}: {exc}") from exc
    if tokenizer.pad_token is None:
        tokenizer.pad_token = tokenizer.eos_token

    model = get_peft_model(model, LoraConfig(
        r=resolved["lora_rank"],
        lora_alpha=resolved["lora_alpha"],
        lora_dropout=resolved["lora_dropout"],
        task_type="CAUSAL_LM",
    ))

    texts = []
    with open(config.training_data, encoding="utf-8") as fh:
        for raw in fh:
            if raw.strip():
                row = json.loads(raw)
                texts.append(row["prompt"] + row["completion"])
    if not texts:
        raise AdapterError(f"training file {config.training_data} is empty")

    max_length = int(resolved.get("max_length", 1024))
    encodings = [
        tokenizer(text, truncation=True, max_length=max_length)
        for text in texts
    ]

    class _Rows(torch.utils.data.Dataset):
        def __len__(self):
            return len(encodings)

        def __getitem__(self, index):
            ids = encodings[index]["input_ids"]
            return {"input_ids": torch.tensor(ids),
                    "attention_mask": torch.tensor(encodings[index]["attention_mask"]),
                    "labels": torch.tensor(ids)}

    output_dir = Path(config.output_dir)
    output_dir.mkdir(parents=True, exist_ok=True)
    arguments = TrainingArguments(
        output_dir=str(output_dir),
        num_train_epochs=resolved["epochs"],
        per_device_train_batch_size=int(resolved.get("batch_size",
                                                     config.batch_size)),
        learning_rate=float(resolved.get("learning_rate", 2e-4)),
        logging_steps=10,
        save_strategy="epoch",
        report_to=[],
    )
    Trainer(model=model, args=arguments, train_dataset=_Rows()).train()
    model.save_pretrained(str(output_dir / "adapter"))
    (output_dir / "effective_config.json").write_text(
        json.dumps(resolved, ensure_ascii=False, indent=2, sort_keys=True) + "\n",
        encoding="utf-8")
    return output_dir / "adapter"
