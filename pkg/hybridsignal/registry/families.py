# Copyright (c) 2021-2022, InterDigital Communications, Inc
# All rights reserved.

# Redistribution and use in source and binary forms, with or without
# modification, are permitted (subject to the limitations in the disclaimer
# below) provided that the following conditions are met:

# * Redistributions of source code must retain the above copyright notice,
#   this list of conditions and the following disclaimer.
# * Redistributions in binary form must reproduce the above copyright notice,
#   this list of conditions and the following disclaimer in the documentation
#   and/or other materials provided with the distribution.
# * Neither the name of InterDigital Communications, Inc nor the names of its
#   contributors may be used to endorse or promote products derived from this
#   software without specific prior written permission.

# NO EXPRESS OR IMPLIED LICENSES TO ANY PARTY'S PATENT RIGHTS ARE GRANTED BY
# THIS LICENSE. THIS SOFTWARE IS PROVIDED BY THE COPYRIGHT HOLDERS AND
# CONTRIBUTORS "AS IS" AND ANY EXPRESS OR IMPLIED WARRANTIES, INCLUDING, BUT
# NOT LIMITED TO, THE IMPLIED WARRANTIES OF MERCHANTABILITY AND FITNESS FOR A
# PARTICULAR PURPOSE ARE DISCLAIMED. IN NO EVENT SHALL THE COPYRIGHT HOLDER OR
# CONTRIBUTORS BE LIABLE FOR ANY DIRECT, INDIRECT, INCIDENTAL, SPECIAL,
# EXEMPLARY, OR CONSEQUENTIAL DAMAGES (INCLUDING, BUT NOT LIMITED TO,
# PROCUREMENT OF SUBSTITUTE GOODS OR SERVICES; LOSS OF USE, DATA, OR PROFITS;
# OR BUSINESS INTERRUPTION) HOWEVER CAUSED AND ON ANY THEORY OF LIABILITY,
# WHETHER IN CONTRACT, STRICT LIABILITY, OR TORT (INCLUDING NEGLIGENCE OR
# OTHERWISE) ARISING IN ANY WAY OUT OF THE USE OF THIS SOFTWARE, EVEN IF
# ADVISED OF THE POSSIBILITY OF SUCH DAMAGE.

from typing import Any, Callable, Dict, Type, TypeVar

GOALS: Dict[str, Callable[..., Any]] = {}
MECHANISMS: Dict[str, Callable[..., Any]] = {}
PRIORS: Dict[str, Callable[..., Any]] = {}

T = TypeVar("T")


def register_goal(name: str):
    """Decorator for registering a goal set."""

    def decorator(cls: Type[T]) -> Type[T]:
        GOALS[name] = cls
        return cls

    return decorator


def register_mechanism(name: str):
    """Decorator for registering a signalling mechanism."""

    def decorator(cls: Type[T]) -> Type[T]:
        MECHANISMS[name] = cls
        return cls

    return decorator


def register_prior(name: str):
    """Decorator for registering a prior family."""

    def decorator(cls: Type[T]) -> Type[T]:
        PRIORS[name] = cls
        return cls

    return decorator


def from_config(registry: Dict[str, Callable[..., Any]], key: str, config: dict):
    """Instantiates the registered class named by ``config[key]``."""
    name = config[key]
    if name not in registry:
        raise ValueError(
            f'Invalid {key} "{name}", choose from ({", ".join(sorted(registry))}).'
        )
    return registry[name].from_config(config)
