"""
This is the `library` of Intercloud: the protocols themselves, without the
simulator. Trust management, messaging, the data exchange formats and the
platform checks live here and can be used on their own.

.. moduleauthor:: Harald Schilly <harald.schilly@univie.ac.at>

"""
from .trust import (AcceptancePolicy, AdmissionEvidence, CloudId, DomainId,
                    IntercloudRoot, TrustLevel, TrustTopology, resolve_trust,
                    verify_certificate)
from .messaging import (Address, Message, MessageKind, MessagingTopology,
                        parse_address, route)
from .udf import FormatError, udf_pack, udf_unpack
from .exchange import ExchangeRoot, StorageEngine
from .platform import (PlatformDescriptor, VirtualMachineImage, MachineConfig,
                       check_api_compat, check_vm_transfer, adapt_config)

__version__ = '0.1'
